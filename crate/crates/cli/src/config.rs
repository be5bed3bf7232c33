//! TOML scenario files.
//!
//! ```toml
//! tau = [1.0, 3.0]
//! steps = 8192
//!
//! [model]
//! family = "phase-covariant"
//! gamma1 = 1.0
//! gamma2 = { kind = "exp-sinusoid", decay = 0.25, offset = 1.0, sin-coeff = 1.0 }
//! gamma3 = 0.5
//! ```
//!
//! Every key is kebab-case and unknown keys are rejected. Optional keys are
//! filled in by [`ScenarioConfig::resolve`] so that the header of each output
//! lists the exact values used.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qsl_core::generator::{GenericLindblad, LindbladTerm};
use qsl_core::{GeneratorSpec, Mat2, RateFn, RateSet};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateConfig {
    Value(f64),
    Expr(RateExpr),
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig::Value(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateExpr {
    Constant {
        value: f64,
    },
    Tanh {
        amplitude: f64,
    },
    #[serde(rename_all = "kebab-case")]
    ExpSinusoid {
        #[serde(default)]
        decay: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        sin_coeff: f64,
        #[serde(default)]
        cos_coeff: f64,
        #[serde(default = "one")]
        frequency: f64,
    },
    JaynesCummings {
        gamma0: f64,
        lambda: f64,
    },
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl RateConfig {
    fn build(&self) -> RateFn {
        match self {
            RateConfig::Value(v) => RateFn::Constant(*v),
            RateConfig::Expr(e) => match e.clone() {
                RateExpr::Constant { value } => RateFn::Constant(value),
                RateExpr::Tanh { amplitude } => RateFn::Tanh { amplitude },
                RateExpr::ExpSinusoid { decay, offset, sin_coeff, cos_coeff, frequency } => {
                    RateFn::ExpSinusoid { decay, offset, sin_coeff, cos_coeff, frequency }
                }
                RateExpr::JaynesCummings { gamma0, lambda } => RateFn::JaynesCummings { gamma0, lambda },
                RateExpr::Tabulated { times, values } => RateFn::Tabulated { times, values },
            },
        }
    }
}

/// A 2×2 operator: a name (`sigma-x`, `sigma-y`, `sigma-z`, `sigma-plus`,
/// `sigma-minus`, `identity`) or rows of `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorConfig {
    Named(String),
    Matrix([[[f64; 2]; 2]; 2]),
}

impl OperatorConfig {
    fn build(&self) -> Result<Mat2, ConfigError> {
        match self {
            OperatorConfig::Named(name) => match name.as_str() {
                "sigma-x" => Ok(Mat2::sigma_x()),
                "sigma-y" => Ok(Mat2::sigma_y()),
                "sigma-z" => Ok(Mat2::sigma_z()),
                "sigma-plus" => Ok(Mat2::sigma_plus()),
                "sigma-minus" => Ok(Mat2::sigma_minus()),
                "identity" => Ok(Mat2::identity()),
                other => Err(ConfigError::Invalid(format!("model.jumps: unknown operator name {other:?}"))),
            },
            OperatorConfig::Matrix(m) => {
                let c = |e: [f64; 2]| Complex64::new(e[0], e[1]);
                Ok(Mat2::new(c(m[0][0]), c(m[0][1]), c(m[1][0]), c(m[1][1])))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub rate: RateConfig,
    pub operator: OperatorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    PhaseCovariant {
        gamma1: RateConfig,
        gamma2: RateConfig,
        gamma3: RateConfig,
        #[serde(default)]
        omega: RateConfig,
    },
    /// `γ₁ = γ`, `γ₂ = κγ`.
    CommutativePhaseCovariant {
        kappa: f64,
        gamma: RateConfig,
        #[serde(default)]
        gamma3: RateConfig,
    },
    Pauli {
        gamma1: RateConfig,
        gamma2: RateConfig,
        gamma3: RateConfig,
    },
    JaynesCummings {
        gamma0: f64,
        lambda: f64,
    },
    EternalNonMarkovian,
    TimeDependentModel,
    GenericLindblad {
        #[serde(default)]
        hamiltonian: Vec<TermConfig>,
        jumps: Vec<TermConfig>,
    },
}

impl ModelConfig {
    pub fn build(&self) -> Result<GeneratorSpec, ConfigError> {
        let spec = match self {
            ModelConfig::PhaseCovariant { gamma1, gamma2, gamma3, omega } => GeneratorSpec::PhaseCovariant(RateSet {
                gamma1: gamma1.build(),
                gamma2: gamma2.build(),
                gamma3: gamma3.build(),
                omega: omega.build(),
            }),
            ModelConfig::CommutativePhaseCovariant { kappa, gamma, gamma3 } => {
                GeneratorSpec::PhaseCovariant(RateSet::commutative(*kappa, gamma.build(), gamma3.build()))
            }
            ModelConfig::Pauli { gamma1, gamma2, gamma3 } => GeneratorSpec::Pauli(RateSet {
                gamma1: gamma1.build(),
                gamma2: gamma2.build(),
                gamma3: gamma3.build(),
                omega: RateFn::zero(),
            }),
            ModelConfig::JaynesCummings { gamma0, lambda } => {
                GeneratorSpec::JaynesCummings { gamma0: *gamma0, lambda: *lambda }
            }
            ModelConfig::EternalNonMarkovian => GeneratorSpec::EternalNonMarkovian,
            ModelConfig::TimeDependentModel => GeneratorSpec::TimeDependentModel,
            ModelConfig::GenericLindblad { hamiltonian, jumps } => {
                let terms = |ts: &[TermConfig]| -> Result<Vec<LindbladTerm>, ConfigError> {
                    ts.iter().map(|t| Ok(LindbladTerm { rate: t.rate.build(), operator: t.operator.build()? })).collect()
                };
                GeneratorSpec::GenericLindblad(GenericLindblad { hamiltonian: terms(hamiltonian)?, jumps: terms(jumps)? })
            }
        };
        spec.validate().map_err(|e| ConfigError::Invalid(format!("model: {e}")))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauConfig {
    One(f64),
    List(Vec<f64>),
}

impl TauConfig {
    pub fn values(&self) -> Vec<f64> {
        match self {
            TauConfig::One(t) => vec![*t],
            TauConfig::List(ts) => ts.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        (0..self.points)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / (self.points - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub a: f64,
    #[serde(default)]
    pub theta: f64,
}

/// A scenario as written in the file; `None` marks a key to be defaulted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub tau: TauConfig,
    pub steps: Option<usize>,
    pub a_grid: Option<usize>,
    pub theta_grid: Option<usize>,
    pub tau_points: Option<usize>,
    pub pair_search_resolution: Option<usize>,
    pub refinement_levels: Option<usize>,
    pub full_pairs: Option<bool>,
    pub gamma0_grid: Option<GridConfig>,
    pub crossing_samples: Option<usize>,
    pub output_points: Option<usize>,
    pub axis: Option<[f64; 3]>,
    pub initial_state: Option<StateConfig>,
    pub output_path: Option<String>,
}

/// A scenario with every default materialised.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Resolved {
    /// Grid steps; `0` means 2048 per unit time for each evolution time.
    pub steps: usize,
    pub tau: Vec<f64>,
    pub a_grid: usize,
    pub theta_grid: usize,
    pub tau_points: usize,
    pub pair_search_resolution: usize,
    pub refinement_levels: usize,
    pub full_pairs: bool,
    pub gamma0_grid: GridConfig,
    pub crossing_samples: usize,
    pub output_points: usize,
    pub axis: [f64; 3],
    pub initial_state: StateConfig,
    /// Destination only; left out of the header so output does not depend on it.
    #[serde(skip)]
    pub output_path: Option<String>,
    pub model: ModelConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| ConfigError::Parse { path: origin.to_string(), message: e.to_string() })?;
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: format!("at `{}`: {}", e.path(), e.inner().message()),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Fills in defaults and checks ranges.
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let tau = self.tau.values();
        if tau.is_empty() || tau.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(ConfigError::Invalid("tau: every value must be finite and positive".into()));
        }
        let r = Resolved {
            steps: self.steps.unwrap_or(0),
            tau,
            a_grid: self.a_grid.unwrap_or(101),
            theta_grid: self.theta_grid.unwrap_or(1),
            tau_points: self.tau_points.unwrap_or(64),
            pair_search_resolution: self.pair_search_resolution.unwrap_or(144),
            refinement_levels: self.refinement_levels.unwrap_or(2),
            full_pairs: self.full_pairs.unwrap_or(false),
            gamma0_grid: self.gamma0_grid.unwrap_or(GridConfig { start: 0.05, stop: 5.0, points: 50 }),
            crossing_samples: self.crossing_samples.unwrap_or(600),
            output_points: self.output_points.unwrap_or(200),
            axis: self.axis.unwrap_or([0.0, 0.0, 1.0]),
            initial_state: self.initial_state.unwrap_or(StateConfig { a: 1.0, theta: 0.0 }),
            output_path: self.output_path.clone(),
            model: self.model.clone(),
        };
        if r.steps != 0 && r.steps < 16 {
            return Err(ConfigError::Invalid("steps: at least 16 are required".into()));
        }
        if r.a_grid < 11 {
            return Err(ConfigError::Invalid("a-grid: at least 11 points are required".into()));
        }
        if r.theta_grid == 0 || r.tau_points == 0 || r.pair_search_resolution == 0 || r.output_points == 0 {
            return Err(ConfigError::Invalid(
                "theta-grid, tau-points, pair-search-resolution and output-points must be positive".into(),
            ));
        }
        if r.crossing_samples < 3 {
            return Err(ConfigError::Invalid("crossing-samples: at least 3 are required".into()));
        }
        let g = r.gamma0_grid;
        if g.points == 0 || !(g.start > 0.0) || g.stop < g.start {
            return Err(ConfigError::Invalid("gamma0-grid: need 0 < start <= stop and points >= 1".into()));
        }
        if !(0.0..=1.0).contains(&r.initial_state.a) {
            return Err(ConfigError::Invalid("initial-state.a: must lie in [0, 1]".into()));
        }
        let n = r.axis;
        if ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() - 1.0).abs() > 1e-9 {
            return Err(ConfigError::Invalid("axis: must be a unit vector".into()));
        }
        self.model.build()?;
        Ok(r)
    }
}

impl Resolved {
    pub fn steps_for(&self, tau: f64) -> usize {
        if self.steps == 0 {
            qsl_core::propagation::default_steps(tau)
        } else {
            self.steps
        }
    }

    /// The resolved scenario as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}
