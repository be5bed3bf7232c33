//! Quantum speed limit `τ_QSL = sin²ℒ(ψ₀, ρ_τ) / Λ_τ^op` and its ratio to the
//! actual evolution time.
//!
//! `Λ_τ = τ⁻¹ ∫₀^τ ‖L_t(ρ_t)‖ dt`. For a qubit `L_t(ρ_t) = ½ ṙ·σ`, so all three
//! norms are proportional to the Bloch speed `|ṙ|`. The speed has kinks where
//! `ṙ` passes through zero; the integral is taken over the smooth signed speed
//! with exact `|·|` on each Simpson panel (see [`crate::quadrature`]).

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::jc;
use crate::nonmarkov;
use crate::propagation::{default_steps, propagate, AffineBlochMap, Trajectory};
use crate::quadrature::{abs_simpson_cumulative, orient_magnitudes, ScalarSamples};
use crate::qubit::{norm_triple, Mat2, NormTriple, PureState};

/// Sign of `z(0)` for the `±z` initial states of coherence non-increasing maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `z(0) = +1`.
    Upper,
    /// `z(0) = −1`.
    Lower,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Branch::Lower
        } else {
            Branch::Upper
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslResult {
    pub tau: f64,
    /// Time-averaged generator norms `Λ_τ`.
    pub lambda_op: f64,
    pub lambda_tr: f64,
    pub lambda_hs: f64,
    pub fidelity: f64,
    /// Bures angle `arccos √F`.
    pub bures: f64,
    pub tau_qsl: f64,
    pub ratio: f64,
    /// Accumulated increase of `n·r(t) = 2F(t) − 1` on `(0, τ)`.
    pub revivals: f64,
}

impl QslResult {
    /// Speed-limit time obtained with the trace norm instead of the operator norm.
    pub fn tau_qsl_tr(&self) -> f64 {
        bound(self.bures, self.lambda_tr, self.tau_qsl)
    }

    /// Speed-limit time obtained with the Hilbert-Schmidt norm.
    pub fn tau_qsl_hs(&self) -> f64 {
        bound(self.bures, self.lambda_hs, self.tau_qsl)
    }
}

fn bound(bures: f64, lambda: f64, fallback: f64) -> f64 {
    if lambda > 0.0 {
        bures.sin().powi(2) / lambda
    } else {
        fallback
    }
}

/// Ratio `(1 − F) / ∫‖L‖_op`, with `1` when nothing has happened yet.
fn ratio_of(one_minus_f: f64, integral: f64) -> f64 {
    if integral <= 0.0 {
        1.0
    } else {
        one_minus_f / integral
    }
}

/// The speed-limit ratio at every even grid index of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct QslSeries {
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub fidelities: Vec<f64>,
    /// `∫₀^t ‖L_s(ρ_s)‖_op ds`.
    pub integrals: Vec<f64>,
}

struct Quadratures {
    op: Vec<f64>,
    tr: Vec<f64>,
    hs: Vec<f64>,
}

/// Cumulative norm integrals at even grid indices.
fn norm_integrals(traj: &Trajectory) -> Quadratures {
    let norms: Vec<NormTriple> = traj
        .velocity
        .iter()
        .map(|v| norm_triple(&Mat2::from_pauli(0.0, v.scale(0.5).to_array())))
        .collect();
    let signs = orient_magnitudes(&traj.velocity.iter().map(|v| v.to_array()).collect::<Vec<_>>());
    let h = traj.step();
    let signed = |f: &dyn Fn(&NormTriple) -> f64| -> Vec<f64> {
        norms.iter().zip(&signs).map(|(n, s)| s * f(n)).collect()
    };
    Quadratures {
        op: abs_simpson_cumulative(h, &signed(&|n| n.op)),
        tr: abs_simpson_cumulative(h, &signed(&|n| n.tr)),
        hs: abs_simpson_cumulative(h, &signed(&|n| n.hs)),
    }
}

/// `1 − F = (1 − n·r)/2` for the pure state with Bloch vector `n`.
fn infidelity(psi: &PureState, traj: &Trajectory, k: usize) -> f64 {
    (0.5 * (1.0 - psi.bloch().dot(&traj.bloch[k]))).clamp(0.0, 1.0)
}

/// Speed-limit ratio along a trajectory started from `psi`, at even grid indices.
pub fn qsl_series_from_trajectory(psi: &PureState, traj: &Trajectory) -> QslSeries {
    let q = norm_integrals(traj);
    let idx: Vec<usize> = (0..traj.len()).step_by(2).collect();
    let fidelities: Vec<f64> = idx.iter().map(|&k| 1.0 - infidelity(psi, traj, k)).collect();
    let ratios = idx
        .iter()
        .zip(&q.op)
        .map(|(&k, &int)| if k == 0 { 1.0 } else { ratio_of(infidelity(psi, traj, k), int) })
        .collect();
    QslSeries { times: idx.iter().map(|&k| traj.times[k]).collect(), ratios, fidelities, integrals: q.op }
}

/// Full result at the end of a trajectory started from `psi`.
pub fn qsl_from_trajectory(psi: &PureState, traj: &Trajectory) -> QslResult {
    let tau = traj.tau();
    let last = traj.len() - 1;
    let one_minus_f = infidelity(psi, traj, last);
    let fidelity = 1.0 - one_minus_f;
    let bures = one_minus_f.sqrt().atan2(fidelity.sqrt());
    let revivals = traj.projection(psi.bloch()).positive_variation();
    if last == 0 {
        let n = norm_triple(&Mat2::from_pauli(0.0, traj.velocity[0].scale(0.5).to_array()));
        return QslResult {
            tau,
            lambda_op: n.op,
            lambda_tr: n.tr,
            lambda_hs: n.hs,
            fidelity,
            bures,
            tau_qsl: 0.0,
            ratio: 1.0,
            revivals,
        };
    }
    let q = norm_integrals(traj);
    let (op, tr, hs) = (*q.op.last().unwrap(), *q.tr.last().unwrap(), *q.hs.last().unwrap());
    let ratio = ratio_of(one_minus_f, op);
    QslResult {
        tau,
        lambda_op: op / tau,
        lambda_tr: tr / tau,
        lambda_hs: hs / tau,
        fidelity,
        bures,
        tau_qsl: ratio * tau,
        ratio,
        revivals,
    }
}

/// Speed-limit time and ratio for the evolution of `psi` over `[0, tau]`.
///
/// `tau = 0` returns ratio 1 by convention (the limit for pure states along an
/// optimal direction).
pub fn qsl_time(spec: &GeneratorSpec, psi: &PureState, tau: f64, steps: usize) -> Result<QslResult> {
    let traj = propagate(spec, &psi.density(), tau, steps)?;
    Ok(qsl_from_trajectory(psi, &traj))
}

/// [`qsl_time`] with the default grid resolution.
pub fn qsl_time_default(spec: &GeneratorSpec, psi: &PureState, tau: f64) -> Result<QslResult> {
    qsl_time(spec, psi, tau, default_steps(tau))
}

/// Speed-limit ratio of `psi` using a precomputed affine map.
pub fn qsl_from_map(spec: &GeneratorSpec, map: &AffineBlochMap, psi: &PureState) -> QslResult {
    qsl_from_trajectory(psi, &map.trajectory(spec, psi.bloch()))
}

/// Closed-form ratio for the Jaynes-Cummings model started in the excited
/// state: `(2𝒩 / (1 − |b_τ|²) + 1)⁻¹` with `𝒩` the BLP value of the `±z` pair.
pub fn qsl_ratio_jc_closed(tau: f64, gamma0: f64, lambda: f64) -> Result<f64> {
    let b = jc::jc_b(tau, gamma0, lambda)?;
    let decay = 1.0 - b * b;
    if decay <= 0.0 {
        return Ok(1.0);
    }
    let n = nonmarkov::blp_jc_analytic(tau, gamma0, lambda)?;
    Ok(1.0 / (2.0 * n / decay + 1.0))
}

/// `G = g ± h` restricted to `[0, tau]`.
fn branch_signal(g: &ScalarSamples, h: &ScalarSamples, tau: f64, branch: Branch) -> ScalarSamples {
    g.combine(1.0, h, branch.sign()).truncated(tau)
}

/// Accumulated increase `ℱ_τ` of `g ± h` on `(0, tau)`, i.e. of `2F − 1` for the
/// initial state `z(0) = ±1` of a coherence non-increasing map.
pub fn revivals_of_fidelity(g: &ScalarSamples, h: &ScalarSamples, tau: f64, branch: Branch) -> f64 {
    branch_signal(g, h, tau, branch).positive_variation()
}

/// Ratio of a coherence non-increasing map for `z(0) = ±1`:
/// `(1 − g(τ) ∓ h(τ)) / ∫|d/dt (g ± h)|`, written as `(1−G)/(1−G + 2ℱ_τ)`.
pub fn qsl_ratio_class_b(g: &ScalarSamples, h: &ScalarSamples, tau: f64, branch: Branch) -> Result<f64> {
    if !(tau >= 0.0) || tau > g.end_time() * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("tau = {tau} outside the sampled range")));
    }
    let signal = branch_signal(g, h, tau, branch);
    let revivals = signal.positive_variation();
    let one_minus_g = 1.0 - signal.last_value();
    let total = one_minus_g + 2.0 * revivals;
    if total <= 1e-12 {
        return Ok(1.0);
    }
    Ok((one_minus_g / total).max(0.0))
}
