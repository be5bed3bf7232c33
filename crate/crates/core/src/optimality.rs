//! Optimal initial states: pure states whose evolution saturates the speed
//! limit at every time.
//!
//! For a pure `ψ₀` the bound is tight at `t` exactly when
//! `−d/dt⟨ψ₀|ρ_t|ψ₀⟩ = ‖ρ̇_t‖_op`, i.e. when `ψ₀` is the eigenvector of the
//! traceless `ρ̇_t` with the negative eigenvalue. For a qubit this reduces to
//! `⟨ψ₀|ρ̇_t|ψ₀⊥⟩ = 0` and `⟨ψ₀|ρ̇_t|ψ₀⟩ ≤ 0`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::{GeneratorSpec, ResidualFamily};
use crate::propagation::{extract_affine_map, propagate};
use crate::quadrature::golden_min;
use crate::qsl::qsl_series_from_trajectory;
use crate::qubit::{Mat2, PureState};
use crate::rates::{RateFn, RateSet};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityReport {
    pub t: f64,
    /// `⟨ψ₀|ρ̇_t|ψ₀⊥⟩`.
    pub c1: Complex64,
    /// `⟨ψ₀|ρ̇_t|ψ₀⟩`.
    pub c2: f64,
    /// `‖ρ̇_t‖_op`.
    pub op_norm: f64,
    pub satisfied: bool,
}

/// Both conditions at time `t` along the trajectory started from `psi`.
pub fn optimality_conditions(spec: &GeneratorSpec, psi: &PureState, t: f64, steps: usize) -> Result<OptimalityReport> {
    let traj = propagate(spec, &psi.density(), t, steps)?;
    let v = traj.velocity[traj.len() - 1];
    let rho_dot = Mat2::from_pauli(0.0, v.scale(0.5).to_array());
    let c1 = rho_dot.sandwich(psi.ket(), psi.perp_ket());
    let c2 = rho_dot.sandwich(psi.ket(), psi.ket()).re;
    Ok(OptimalityReport {
        t,
        c1,
        c2,
        op_norm: 0.5 * v.norm(),
        satisfied: c1.norm() <= tolerance::RESIDUAL && c2 <= tolerance::RESIDUAL,
    })
}

fn mismatch(family: ResidualFamily, what: &str) -> Error {
    Error::ConfigMismatch(format!("{family:?} residual {what}"))
}

fn cumulative_at(rate: &RateFn, t: f64) -> Result<f64> {
    Ok(*rate.cumulative(&[0.0, t])?.last().unwrap())
}

/// Analytic optimality condition for real superpositions (`θ = 0`) with all
/// positive exponential prefactors stripped; it vanishes exactly where the
/// state `(a, θ = 0)` is optimal at time `t`.
///
/// * phase-covariant, constant rates, `ω = 0`:
///   `(a−1)a·[−4e^{γ₃t}((a−1)γ₁ + aγ₂) − (1−2a)e^{(γ₁+γ₂)t/4}(γ₁+γ₂+4γ₃)]`
/// * Pauli, constant rates:
///   `(1−2a)²(a−1)a·[(γ₁+γ₂)e^{2γ₃t} − (γ₂+γ₃)e^{2γ₁t}]²`
/// * eternal model: `(1−2a)²(a−1)a`
/// * time-dependent model, `a = ½`: `½(B − |B|)` with `B = 1 + 4cos t + sin t`;
///   other `a`: `(a−1)a(1−2a)·[−(γ′/2)e^{−Γz} + (γ′/4 + γ₃)e^{−Γ⊥}]` with
///   `γ′ = γ₁ + γ₂`, `Γz = ½∫γ′`, `Γ⊥ = Γz/2 + ∫γ₃`.
pub fn condition_residual(family: ResidualFamily, a: f64, t: f64, rates: &RateSet) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("need a in [0, 1] and t ≥ 0, got a = {a}, t = {t}")));
    }
    match family {
        ResidualFamily::PhaseCovariant => {
            let [g1, g2, g3] = rates.constant_rates().ok_or_else(|| mismatch(family, "needs constant rates"))?;
            if rates.omega.is_constant() != Some(0.0) {
                return Err(mismatch(family, "needs omega = 0"));
            }
            let bracket = -4.0 * (g3 * t).exp() * ((a - 1.0) * g1 + a * g2)
                - (1.0 - 2.0 * a) * ((g1 + g2) * t / 4.0).exp() * (g1 + g2 + 4.0 * g3);
            Ok((a - 1.0) * a * bracket)
        }
        ResidualFamily::Pauli => {
            let [g1, g2, g3] = rates.constant_rates().ok_or_else(|| mismatch(family, "needs constant rates"))?;
            let bracket = (g1 + g2) * (2.0 * g3 * t).exp() - (g2 + g3) * (2.0 * g1 * t).exp();
            Ok((1.0 - 2.0 * a).powi(2) * (a - 1.0) * a * bracket * bracket)
        }
        ResidualFamily::EternalNonMarkovian => {
            if *rates != RateSet::eternal_non_markovian() {
                return Err(mismatch(family, "needs the eternal model's rates"));
            }
            Ok((1.0 - 2.0 * a).powi(2) * (a - 1.0) * a)
        }
        ResidualFamily::TimeDependentModel => {
            if *rates != RateSet::time_dependent_model() {
                return Err(mismatch(family, "needs the time-dependent model's rates"));
            }
            if (a - 0.5).abs() <= tolerance::CONSTRUCTION {
                let b = 1.0 + 4.0 * t.cos() + t.sin();
                return Ok(0.5 * (b - b.abs()));
            }
            let [g1, g2, g3, _] = rates.eval(t)?;
            let gp = g1 + g2;
            let gamma_z = 0.5 * (cumulative_at(&rates.gamma1, t)? + cumulative_at(&rates.gamma2, t)?);
            let gamma_perp = 0.5 * gamma_z + cumulative_at(&rates.gamma3, t)?;
            let bracket = -0.5 * gp * (-gamma_z).exp() + (0.25 * gp + g3) * (-gamma_perp).exp();
            Ok((a - 1.0) * a * (1.0 - 2.0 * a) * bracket)
        }
    }
}

/// One row of an optimal-state scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub a: f64,
    /// Smallest speed-limit ratio over the sampled evolution times.
    pub min_ratio: f64,
    pub optimal: bool,
    /// Root of the analytic residual near `a`, when the family has one and it vanishes there.
    pub polished_a: Option<f64>,
}

/// Settings of [`optimal_state_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    /// Number of equally spaced populations `a ∈ [0, 1]`, at least 11.
    pub a_points: usize,
    /// Number of evolution times `τ′ ∈ (0, τ]` at which the ratio is checked.
    pub tau_points: usize,
    pub theta: f64,
    pub steps: usize,
}

/// For each `a` the minimum over `τ′ ∈ (0, τ]` of the speed-limit ratio of
/// `ψ(a, θ)`; `a` is flagged optimal when that minimum is at least `1 − 10⁻⁶`.
/// Flagged points are polished on the analytic residual of the family, where
/// one exists and `θ` is real.
pub fn optimal_state_scan(spec: &GeneratorSpec, tau: f64, settings: &ScanSettings) -> Result<Vec<ScanRow>> {
    if settings.a_points < 11 || settings.tau_points == 0 || !(tau > 0.0) {
        return Err(Error::InvalidArgument("scan needs at least 11 populations, one time and tau > 0".into()));
    }
    let map = extract_affine_map(spec, tau, settings.steps)?;
    let n_even = map.len().div_ceil(2);
    let picks: Vec<usize> = (1..=settings.tau_points)
        .map(|j| ((j * (n_even - 1)) as f64 / settings.tau_points as f64).round() as usize)
        .filter(|&j| j > 0)
        .collect();
    let a_grid: Vec<f64> = (0..settings.a_points).map(|k| k as f64 / (settings.a_points - 1) as f64).collect();
    let mins: Vec<f64> = a_grid
        .par_iter()
        .map(|&a| -> Result<f64> {
            let psi = PureState::new(a, settings.theta)?;
            let series = qsl_series_from_trajectory(&psi, &map.trajectory(spec, psi.bloch()));
            Ok(picks.iter().map(|&j| series.ratios[j]).fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<_>>()?;
    let residual = residual_context(spec, settings.theta);
    let times: Vec<f64> = picks.iter().map(|&j| map.times[2 * j]).collect();
    let mut rows = Vec::with_capacity(a_grid.len());
    for (k, (&a, &min_ratio)) in a_grid.iter().zip(&mins).enumerate() {
        let optimal = min_ratio >= 1.0 - tolerance::OPTIMAL_RATIO;
        let polished_a = match (&residual, optimal) {
            (Some((family, rates)), true) => {
                let lo = a_grid[k.saturating_sub(1)];
                let hi = a_grid[(k + 1).min(a_grid.len() - 1)];
                polish(*family, rates, &times, a, lo, hi)?
            }
            _ => None,
        };
        rows.push(ScanRow { a, min_ratio, optimal, polished_a });
    }
    Ok(rows)
}

fn residual_context(spec: &GeneratorSpec, theta: f64) -> Option<(ResidualFamily, RateSet)> {
    if theta.sin().abs() > tolerance::CONSTRUCTION {
        return None;
    }
    let family = spec.residual_family()?;
    let rates = spec.phase_covariant_rates().or_else(|| spec.pauli_rates())?;
    condition_residual(family, 0.5, 0.0, &rates).ok()?;
    Some((family, rates))
}

/// `max_t |residual(a, t)|` minimised over `[lo, hi]` by golden section (the
/// residuals have double roots, so there may be no sign change to bisect on).
fn polish(family: ResidualFamily, rates: &RateSet, times: &[f64], a: f64, lo: f64, hi: f64) -> Result<Option<f64>> {
    let worst = |a: f64| -> f64 {
        times
            .iter()
            .map(|&t| condition_residual(family, a, t, rates).map(f64::abs).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    };
    let scale = worst(lo).max(worst(hi)).max(1.0);
    if worst(a) <= tolerance::RESIDUAL * scale {
        return Ok(Some(a));
    }
    let root = golden_min(worst, lo, hi, tolerance::BISECTION_TIME);
    Ok((worst(root) <= tolerance::RESIDUAL * scale).then_some(root))
}
