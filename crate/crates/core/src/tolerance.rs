//! Numerical tolerances shared by every module.

/// Hermiticity, trace and positivity slack when a state is constructed.
pub const CONSTRUCTION: f64 = 1e-12;

/// Agreement between two routes to the same quantity (e.g. matrix vs Bloch trace distance).
pub const CROSS_CHECK: f64 = 1e-12;

/// Bloch-norm slack for states produced by propagation.
pub const PHYSICS_DRIFT: f64 = 1e-9;

/// Bloch-norm excess above which propagation is aborted.
pub const HARD_DRIFT: f64 = 1e-6;

/// Largest Richardson error estimate accepted from the fixed-step integrator.
pub const RICHARDSON_MAX: f64 = 1e-7;

/// Tolerance on `tau_qsl / tau` when flagging an evolution as optimal.
pub const OPTIMAL_RATIO: f64 = 1e-6;

/// Tolerance on optimality-condition residuals and on `|c1|`, `c2`.
pub const RESIDUAL: f64 = 1e-10;

/// Time resolution of bisection root searches.
pub const BISECTION_TIME: f64 = 1e-10;

/// Dead band applied to derivative signs when classifying maps.
pub const SIGN_DEAD_BAND: f64 = 1e-10;

/// Bloch-vector norm accepted for a physical state.
pub const BLOCH_NORM: f64 = 1e-9;

/// Per-unit-time absolute tolerance of the adaptive Simpson rule used for rate integrals.
pub const RATE_INTEGRAL: f64 = 1e-10;
