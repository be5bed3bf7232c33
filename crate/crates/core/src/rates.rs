//! Declarative time-dependent rate functions.

use crate::error::{Error, Result};
use crate::jc;
use crate::quadrature;

/// A rate (or frequency) as a function of time, drawn from a closed family.
#[derive(Debug, Clone, PartialEq)]
pub enum RateFn {
    Constant(f64),
    /// `amplitude · tanh(t)`.
    Tanh { amplitude: f64 },
    /// `e^{−decay·t} (offset + sin_coeff·sin(ω t) + cos_coeff·cos(ω t))`.
    ExpSinusoid { decay: f64, offset: f64, sin_coeff: f64, cos_coeff: f64, frequency: f64 },
    /// Jaynes-Cummings rate `γ(t)`; diverges at zeros of `b_t` when `γ₀ > λ/2`.
    JaynesCummings { gamma0: f64, lambda: f64 },
    /// Piecewise-linear interpolation of tabulated values, constant beyond the ends.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
    Scaled { factor: f64, base: Box<RateFn> },
}

impl RateFn {
    pub fn zero() -> Self {
        RateFn::Constant(0.0)
    }

    pub fn scaled(self, factor: f64) -> Self {
        RateFn::Scaled { factor, base: Box::new(self) }
    }

    /// Checks parameters for finiteness and table consistency.
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match self {
            RateFn::Constant(c) => c.is_finite(),
            RateFn::Tanh { amplitude } => amplitude.is_finite(),
            RateFn::ExpSinusoid { decay, offset, sin_coeff, cos_coeff, frequency } => {
                finite(&[*decay, *offset, *sin_coeff, *cos_coeff, *frequency])
            }
            RateFn::JaynesCummings { gamma0, lambda } => {
                *gamma0 > 0.0 && *lambda > 0.0 && finite(&[*gamma0, *lambda])
            }
            RateFn::Tabulated { times, values } => {
                !times.is_empty()
                    && times.len() == values.len()
                    && finite(times)
                    && finite(values)
                    && times.windows(2).all(|w| w[0] < w[1])
            }
            RateFn::Scaled { factor, base } => {
                base.validate()?;
                factor.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid rate function {self:?}")))
        }
    }

    /// Value at `t ≥ 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match self {
            RateFn::Constant(c) => *c,
            RateFn::Tanh { amplitude } => amplitude * t.tanh(),
            RateFn::ExpSinusoid { decay, offset, sin_coeff, cos_coeff, frequency } => {
                (-decay * t).exp()
                    * (offset + sin_coeff * (frequency * t).sin() + cos_coeff * (frequency * t).cos())
            }
            RateFn::JaynesCummings { gamma0, lambda } => jc::jc_rate(t, *gamma0, *lambda)?,
            RateFn::Tabulated { times, values } => interpolate(times, values, t),
            RateFn::Scaled { factor, base } => factor * base.eval(t)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteRate { t })
        }
    }

    /// Evaluation for quadrature, where an error is mapped to NaN and detected afterwards.
    fn eval_or_nan(&self, t: f64) -> f64 {
        self.eval(t).unwrap_or(f64::NAN)
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            RateFn::Constant(c) => Some(*c),
            RateFn::Scaled { factor, base } => base.is_constant().map(|c| c * factor),
            _ => None,
        }
    }

    /// First time at which the rate diverges, if any.
    pub fn first_pole(&self) -> Option<f64> {
        match self {
            RateFn::JaynesCummings { gamma0, lambda } => jc::first_zero(*gamma0, *lambda),
            RateFn::Scaled { base, .. } => base.first_pole(),
            _ => None,
        }
    }

    /// `∫₀^{tᵢ}` of the rate at every grid time.
    pub fn cumulative(&self, times: &[f64]) -> Result<Vec<f64>> {
        if let (Some(t0), Some(end)) = (self.first_pole(), times.last()) {
            if t0 <= *end {
                return Err(Error::RatePole { t: t0, sign: '+' });
            }
        }
        if let Some(c) = self.is_constant() {
            return Ok(times.iter().map(|t| c * t).collect());
        }
        let out = quadrature::cumulative_integral(&|t| self.eval_or_nan(t), times);
        if let Some(k) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteRate { t: times[k] });
        }
        Ok(out)
    }

    /// `κ` such that `self = κ · other` holds structurally, if it does.
    pub fn ratio_to(&self, other: &RateFn) -> Option<f64> {
        if self == other {
            return Some(1.0);
        }
        if let (Some(a), Some(b)) = (self.is_constant(), other.is_constant()) {
            return if b != 0.0 { Some(a / b) } else if a == 0.0 { Some(1.0) } else { None };
        }
        if let RateFn::Scaled { factor, base } = self {
            if let Some(k) = base.ratio_to(other) {
                return Some(factor * k);
            }
        }
        if let RateFn::Scaled { factor, base } = other {
            if *factor != 0.0 {
                if let Some(k) = self.ratio_to(base) {
                    return Some(k / factor);
                }
            }
        }
        None
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    if t <= times[0] {
        return values[0];
    }
    let n = times.len();
    if t >= times[n - 1] {
        return values[n - 1];
    }
    let i = times.partition_point(|&x| x <= t);
    let (t0, t1) = (times[i - 1], times[i]);
    let w = (t - t0) / (t1 - t0);
    values[i - 1] * (1.0 - w) + values[i] * w
}

/// Rates of the phase-covariant or Pauli master equation.
///
/// For the phase-covariant family `gamma1` pumps (`σ₊` jumps), `gamma2` decays
/// (`σ₋` jumps), `gamma3` dephases and `omega` is the `σ₃` frequency. The Pauli
/// family uses `gamma1..3` for the three Pauli channels and ignores `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSet {
    pub gamma1: RateFn,
    pub gamma2: RateFn,
    pub gamma3: RateFn,
    pub omega: RateFn,
}

impl RateSet {
    pub fn constant(gamma1: f64, gamma2: f64, gamma3: f64) -> Self {
        RateSet {
            gamma1: RateFn::Constant(gamma1),
            gamma2: RateFn::Constant(gamma2),
            gamma3: RateFn::Constant(gamma3),
            omega: RateFn::zero(),
        }
    }

    /// Commutative phase-covariant rates `γ₁ = γ`, `γ₂ = κγ`.
    pub fn commutative(kappa: f64, gamma: RateFn, gamma3: RateFn) -> Self {
        RateSet { gamma2: gamma.clone().scaled(kappa), gamma1: gamma, gamma3, omega: RateFn::zero() }
    }

    /// Eternal non-Markovian Pauli rates `(½, ½, −tanh(t)/2)`.
    pub fn eternal_non_markovian() -> Self {
        RateSet {
            gamma1: RateFn::Constant(0.5),
            gamma2: RateFn::Constant(0.5),
            gamma3: RateFn::Tanh { amplitude: -0.5 },
            omega: RateFn::zero(),
        }
    }

    /// Phase-covariant rates `γ₁ = γ₂ = e^{−t/4}(1 + sin t)`, `γ₃ = 2e^{−t/4} cos t`, `ω = 0`.
    pub fn time_dependent_model() -> Self {
        let pump = RateFn::ExpSinusoid { decay: 0.25, offset: 1.0, sin_coeff: 1.0, cos_coeff: 0.0, frequency: 1.0 };
        RateSet {
            gamma1: pump.clone(),
            gamma2: pump,
            gamma3: RateFn::ExpSinusoid { decay: 0.25, offset: 0.0, sin_coeff: 0.0, cos_coeff: 2.0, frequency: 1.0 },
            omega: RateFn::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gamma1.validate()?;
        self.gamma2.validate()?;
        self.gamma3.validate()?;
        self.omega.validate()
    }

    /// `[γ₁(t), γ₂(t), γ₃(t), ω(t)]`.
    pub fn eval(&self, t: f64) -> Result<[f64; 4]> {
        Ok([self.gamma1.eval(t)?, self.gamma2.eval(t)?, self.gamma3.eval(t)?, self.omega.eval(t)?])
    }

    /// All three rates are constant.
    pub fn constant_rates(&self) -> Option<[f64; 3]> {
        Some([self.gamma1.is_constant()?, self.gamma2.is_constant()?, self.gamma3.is_constant()?])
    }

    /// `c` with `γ₁ − γ₂ = c (γ₁ + γ₂)` identically in time, when the pump and
    /// decay rates are structurally proportional (the commutative case).
    pub fn pump_decay_balance(&self) -> Option<f64> {
        let k = self.gamma2.ratio_to(&self.gamma1)?;
        if (1.0 + k).abs() < 1e-300 {
            return None;
        }
        Some((1.0 - k) / (1.0 + k))
    }

    /// Any rate negative at `t`: the rate-sign indicator of broken CP-divisibility.
    pub fn has_negative_rate(&self, t: f64) -> Result<bool> {
        let [g1, g2, g3, _] = self.eval(t)?;
        Ok(g1 < 0.0 || g2 < 0.0 || g3 < 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_dependent_rates_match_formulas() {
        let r = RateSet::time_dependent_model();
        for k in 0..60 {
            let t = 0.1 * k as f64;
            let [g1, g2, g3, w] = r.eval(t).unwrap();
            let e = (-t / 4.0).exp();
            assert!((g1 - e * (1.0 + t.sin())).abs() < 1e-15);
            assert_eq!(g1, g2);
            assert!((g3 - 2.0 * e * t.cos()).abs() < 1e-15);
            assert_eq!(w, 0.0);
        }
    }

    #[test]
    fn eternal_rates_negative_after_zero() {
        let r = RateSet::eternal_non_markovian();
        assert!(!r.has_negative_rate(0.0).unwrap());
        for k in 1..100 {
            let t = 0.05 * k as f64;
            let [_, _, g3, _] = r.eval(t).unwrap();
            assert!(g3 < 0.0);
            assert!((g3 + 0.5 * t.tanh()).abs() < 1e-16);
        }
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let times: Vec<f64> = (0..=400).map(|k| k as f64 * 0.025).collect();
        let r = RateFn::Tanh { amplitude: -0.5 };
        let c = r.cumulative(&times).unwrap();
        for (t, v) in times.iter().zip(&c) {
            assert!((v + 0.5 * t.cosh().ln()).abs() < 1e-10);
        }
        let tab = RateFn::Tabulated { times: vec![0.0, 1.0, 2.0], values: vec![0.0, 2.0, 2.0] };
        assert_eq!(tab.eval(0.5).unwrap(), 1.0);
        assert_eq!(tab.eval(7.0).unwrap(), 2.0);
        let c = tab.cumulative(&[0.0, 1.0, 2.0]).unwrap();
        assert!((c[1] - 1.0).abs() < 1e-12 && (c[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn balance_detects_commutative_structure() {
        let g = RateFn::ExpSinusoid { decay: 0.0, offset: 1.0, sin_coeff: 0.0, cos_coeff: 2.0, frequency: 2.0 };
        let r = RateSet::commutative(0.5, g.clone(), RateFn::zero());
        assert!((r.pump_decay_balance().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(RateSet::constant(1.0, 2.0, 3.0).pump_decay_balance(), Some(-1.0 / 3.0));
        assert_eq!(RateSet::time_dependent_model().pump_decay_balance(), Some(0.0));
        let mut mixed = RateSet::constant(1.0, 1.0, 0.0);
        mixed.gamma2 = g;
        assert_eq!(mixed.pump_decay_balance(), None);
    }

    #[test]
    fn pole_surfaces_as_error() {
        let r = RateFn::JaynesCummings { gamma0: 5.0, lambda: 1.0 };
        let t0 = crate::jc::first_zero(5.0, 1.0).unwrap();
        assert!(matches!(r.cumulative(&[0.0, 0.5 * t0, 2.0 * t0]), Err(Error::RatePole { .. })));
        assert!(r.cumulative(&[0.0, 0.5 * t0]).is_ok());
        assert!(matches!(r.eval(t0), Err(Error::RatePole { .. })));
        assert!(RateFn::JaynesCummings { gamma0: -1.0, lambda: 1.0 }.validate().is_err());
    }
}
