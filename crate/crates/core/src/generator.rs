//! Time-local generators `L_t(ρ)` of the supported master-equation families.
//!
//! Every family is affine in Bloch coordinates, `ṙ = M(t) r + c(t)`; the named
//! families expose that form directly, and [`GeneratorSpec::bloch_affine`]
//! derives it for arbitrary Lindblad generators from matrix evaluations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jc;
use crate::qubit::{BlochVector, DensityMatrix, Mat2};
use crate::quadrature::ScalarSamples;
use crate::rates::{RateFn, RateSet};
use crate::tolerance;

/// One time-dependent term `f(t) · O` of a generic Lindblad generator.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladTerm {
    pub rate: RateFn,
    pub operator: Mat2,
}

/// `L(ρ) = −i Σₖ hₖ(t) [Hₖ, ρ] + Σⱼ γⱼ(t) (AⱼρAⱼ† − ½{Aⱼ†Aⱼ, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericLindblad {
    pub hamiltonian: Vec<LindbladTerm>,
    pub jumps: Vec<LindbladTerm>,
}

/// Which master equation drives the qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    PhaseCovariant(RateSet),
    Pauli(RateSet),
    /// Resonant damped Jaynes-Cummings model, a pure `σ₋` dissipator with rate `γ(t)`.
    JaynesCummings { gamma0: f64, lambda: f64 },
    /// Pauli rates `(½, ½, −tanh(t)/2)`.
    EternalNonMarkovian,
    /// Phase-covariant rates of [`RateSet::time_dependent_model`].
    TimeDependentModel,
    GenericLindblad(GenericLindblad),
}

/// Families with an analytic optimality-condition residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualFamily {
    PhaseCovariant,
    Pauli,
    EternalNonMarkovian,
    TimeDependentModel,
}

/// `ṙ = m r + c`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochAffine {
    pub m: [[f64; 3]; 3],
    pub c: [f64; 3],
}

impl BlochAffine {
    pub fn apply(&self, r: [f64; 3]) -> [f64; 3] {
        let mut out = self.c;
        for (i, row) in self.m.iter().enumerate() {
            out[i] += row[0] * r[0] + row[1] * r[1] + row[2] * r[2];
        }
        out
    }

    fn phase_covariant(g1: f64, g2: f64, g3: f64, omega: f64) -> Self {
        let transverse = 0.25 * (g1 + g2) + g3;
        BlochAffine {
            m: [
                [-transverse, -2.0 * omega, 0.0],
                [2.0 * omega, -transverse, 0.0],
                [0.0, 0.0, -0.5 * (g1 + g2)],
            ],
            c: [0.0, 0.0, 0.5 * (g1 - g2)],
        }
    }

    fn pauli(g1: f64, g2: f64, g3: f64) -> Self {
        BlochAffine {
            m: [
                [-2.0 * (g2 + g3), 0.0, 0.0],
                [0.0, -2.0 * (g1 + g3), 0.0],
                [0.0, 0.0, -2.0 * (g1 + g2)],
            ],
            c: [0.0; 3],
        }
    }
}

/// `AρA† − ½{A†A, ρ}`.
fn dissipator(a: &Mat2, rho: &Mat2) -> Mat2 {
    let ad = a.dagger();
    *a * *rho * ad - (ad * *a).anticommutator(rho).scale(0.5)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time must be finite and non-negative, got {t}")))
    }
}

impl GeneratorSpec {
    pub fn jaynes_cummings(gamma0: f64, lambda: f64) -> Result<Self> {
        let spec = GeneratorSpec::JaynesCummings { gamma0, lambda };
        spec.validate()?;
        Ok(spec)
    }

    /// Short family name used in reports.
    pub fn family_name(&self) -> &'static str {
        match self {
            GeneratorSpec::PhaseCovariant(_) => "phase-covariant",
            GeneratorSpec::Pauli(_) => "pauli",
            GeneratorSpec::JaynesCummings { .. } => "jaynes-cummings",
            GeneratorSpec::EternalNonMarkovian => "eternal-non-markovian",
            GeneratorSpec::TimeDependentModel => "time-dependent-model",
            GeneratorSpec::GenericLindblad(_) => "generic-lindblad",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::PhaseCovariant(r) | GeneratorSpec::Pauli(r) => r.validate(),
            GeneratorSpec::JaynesCummings { gamma0, lambda } => {
                if *gamma0 > 0.0 && *lambda > 0.0 && gamma0.is_finite() && lambda.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "Jaynes-Cummings needs gamma0 > 0 and lambda > 0, got {gamma0}, {lambda}"
                    )))
                }
            }
            GeneratorSpec::EternalNonMarkovian | GeneratorSpec::TimeDependentModel => Ok(()),
            GeneratorSpec::GenericLindblad(g) => {
                if g.jumps.is_empty() {
                    return Err(Error::InvalidArgument("generic Lindblad needs at least one jump operator".into()));
                }
                for term in g.hamiltonian.iter().chain(&g.jumps) {
                    term.rate.validate()?;
                    if !term.operator.is_finite() {
                        return Err(Error::InvalidArgument("non-finite Lindblad operator".into()));
                    }
                }
                for term in &g.hamiltonian {
                    if term.operator.hermiticity_defect() > tolerance::CONSTRUCTION {
                        return Err(Error::InvalidArgument("Hamiltonian term is not Hermitian".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// Phase-covariant rates equivalent to this spec, if it is in that family.
    /// Jaynes-Cummings maps to `γ₂ = 2γ(t)`.
    pub fn phase_covariant_rates(&self) -> Option<RateSet> {
        match self {
            GeneratorSpec::PhaseCovariant(r) => Some(r.clone()),
            GeneratorSpec::TimeDependentModel => Some(RateSet::time_dependent_model()),
            GeneratorSpec::JaynesCummings { gamma0, lambda } => Some(RateSet {
                gamma1: RateFn::zero(),
                gamma2: RateFn::JaynesCummings { gamma0: *gamma0, lambda: *lambda }.scaled(2.0),
                gamma3: RateFn::zero(),
                omega: RateFn::zero(),
            }),
            _ => None,
        }
    }

    /// Pauli rates equivalent to this spec, if it is in that family.
    pub fn pauli_rates(&self) -> Option<RateSet> {
        match self {
            GeneratorSpec::Pauli(r) => Some(r.clone()),
            GeneratorSpec::EternalNonMarkovian => Some(RateSet::eternal_non_markovian()),
            _ => None,
        }
    }

    pub fn residual_family(&self) -> Option<ResidualFamily> {
        match self {
            GeneratorSpec::PhaseCovariant(_) => Some(ResidualFamily::PhaseCovariant),
            GeneratorSpec::Pauli(_) => Some(ResidualFamily::Pauli),
            GeneratorSpec::EternalNonMarkovian => Some(ResidualFamily::EternalNonMarkovian),
            GeneratorSpec::TimeDependentModel => Some(ResidualFamily::TimeDependentModel),
            _ => None,
        }
    }

    /// Rate-sign indicator of broken CP-divisibility at `t`: some Lindblad rate is negative.
    pub fn has_negative_rate(&self, t: f64) -> Result<bool> {
        if let Some(r) = self.phase_covariant_rates().or_else(|| self.pauli_rates()) {
            return r.has_negative_rate(t);
        }
        if let GeneratorSpec::GenericLindblad(g) = self {
            for term in &g.jumps {
                if term.rate.eval(t)? < 0.0 {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// `L_t(ρ)` for a validated state.
    pub fn evaluate(&self, rho: &DensityMatrix, t: f64) -> Result<Mat2> {
        self.apply_matrix(rho.matrix(), t)
    }

    /// `L_t` applied to an arbitrary matrix (the generator is linear).
    pub fn apply_matrix(&self, rho: &Mat2, t: f64) -> Result<Mat2> {
        check_time(t)?;
        let out = match self {
            GeneratorSpec::PhaseCovariant(_) | GeneratorSpec::TimeDependentModel => {
                let rates = self.phase_covariant_rates().expect("phase-covariant family");
                let [g1, g2, g3, omega] = rates.eval(t)?;
                phase_covariant_matrix(rho, g1, g2, g3, omega)
            }
            GeneratorSpec::JaynesCummings { gamma0, lambda } => {
                let gamma = jc::jc_rate(t, *gamma0, *lambda)?;
                dissipator(&Mat2::sigma_minus(), rho).scale(gamma)
            }
            GeneratorSpec::Pauli(_) | GeneratorSpec::EternalNonMarkovian => {
                let [g1, g2, g3, _] = self.pauli_rates().expect("Pauli family").eval(t)?;
                let sigmas = [Mat2::sigma_x(), Mat2::sigma_y(), Mat2::sigma_z()];
                let mut acc = Mat2::zero();
                for (g, s) in [g1, g2, g3].into_iter().zip(sigmas) {
                    acc += (s * *rho * s - *rho).scale(g);
                }
                acc
            }
            GeneratorSpec::GenericLindblad(g) => {
                let mut acc = Mat2::zero();
                for term in &g.hamiltonian {
                    let h = term.rate.eval(t)?;
                    acc += term.operator.commutator(rho).scale_c(Complex64::new(0.0, -h));
                }
                for term in &g.jumps {
                    acc += dissipator(&term.operator, rho).scale(term.rate.eval(t)?);
                }
                acc
            }
        };
        if !out.is_finite() {
            return Err(Error::NonFiniteRate { t });
        }
        Ok(out)
    }

    /// Affine Bloch-space form `ṙ = M r + c` of the generator at time `t`.
    pub fn bloch_affine(&self, t: f64) -> Result<BlochAffine> {
        check_time(t)?;
        match self {
            GeneratorSpec::PhaseCovariant(_) | GeneratorSpec::TimeDependentModel => {
                let [g1, g2, g3, omega] = self.phase_covariant_rates().expect("phase-covariant family").eval(t)?;
                Ok(BlochAffine::phase_covariant(g1, g2, g3, omega))
            }
            GeneratorSpec::JaynesCummings { gamma0, lambda } => {
                let gamma = jc::jc_rate(t, *gamma0, *lambda)?;
                Ok(BlochAffine::phase_covariant(0.0, 2.0 * gamma, 0.0, 0.0))
            }
            GeneratorSpec::Pauli(_) | GeneratorSpec::EternalNonMarkovian => {
                let [g1, g2, g3, _] = self.pauli_rates().expect("Pauli family").eval(t)?;
                Ok(BlochAffine::pauli(g1, g2, g3))
            }
            GeneratorSpec::GenericLindblad(_) => {
                // L(I/2) gives c; L(σᵢ/2) gives column i of M.
                let c = self.apply_matrix(&Mat2::identity().scale(0.5), t)?.pauli_components();
                let mut m = [[0.0; 3]; 3];
                let sigmas = [Mat2::sigma_x(), Mat2::sigma_y(), Mat2::sigma_z()];
                for (j, s) in sigmas.iter().enumerate() {
                    let col = self.apply_matrix(&s.scale(0.5), t)?.pauli_components();
                    for i in 0..3 {
                        m[i][j] = col[i];
                    }
                }
                Ok(BlochAffine { m, c })
            }
        }
    }

    /// Bloch velocity `ṙ` at state `r` and time `t`.
    pub fn bloch_velocity(&self, r: BlochVector, t: f64) -> Result<BlochVector> {
        Ok(BlochVector::from_array(self.bloch_affine(t)?.apply(r.to_array())))
    }
}

fn phase_covariant_matrix(rho: &Mat2, g1: f64, g2: f64, g3: f64, omega: f64) -> Mat2 {
    let sz = Mat2::sigma_z();
    let unitary = (*rho * sz - sz * *rho).scale_c(Complex64::new(0.0, omega));
    let pump = dissipator(&Mat2::sigma_plus(), rho).scale(0.5 * g1);
    let decay = dissipator(&Mat2::sigma_minus(), rho).scale(0.5 * g2);
    let dephase = (sz * *rho * sz - *rho).scale(0.5 * g3);
    unitary + pump + decay + dephase
}

/// `L_t(ρ)` for the given spec.
pub fn evaluate_generator(spec: &GeneratorSpec, rho: &DensityMatrix, t: f64) -> Result<Mat2> {
    spec.evaluate(rho, t)
}

/// Deformation `g(t) = e^{−Γ(t)}` and translation `h(t) = (1−κ)/(1+κ)(1 − e^{−Γ(t)})`
/// of commutative phase-covariant dynamics with `γ₁ = γ`, `γ₂ = κγ`, where
/// `Γ(t) = (1+κ)/2 ∫₀ᵗ γ`.
pub fn commutative_pc_gh(t: f64, kappa: f64, gamma: &RateFn) -> Result<(f64, f64)> {
    check_time(t)?;
    let gamma_int = gamma.cumulative(&[0.0, t])?[1];
    Ok(gh_from_integral(kappa, gamma_int))
}

fn gh_from_integral(kappa: f64, gamma_int: f64) -> (f64, f64) {
    let big_gamma = 0.5 * (1.0 + kappa) * gamma_int;
    let g = (-big_gamma).exp();
    let h = (1.0 - kappa) / (1.0 + kappa) * (1.0 - g);
    (g, h)
}

/// [`commutative_pc_gh`] on a whole grid, with exact derivatives.
pub fn commutative_pc_gh_samples(
    times: &[f64],
    kappa: f64,
    gamma: &RateFn,
) -> Result<(ScalarSamples, ScalarSamples)> {
    let ints = gamma.cumulative(times)?;
    let c = (1.0 - kappa) / (1.0 + kappa);
    let mut g = Vec::with_capacity(times.len());
    let mut h = Vec::with_capacity(times.len());
    let mut dg = Vec::with_capacity(times.len());
    let mut dh = Vec::with_capacity(times.len());
    for (&t, &int) in times.iter().zip(&ints) {
        let (gv, hv) = gh_from_integral(kappa, int);
        let rate = 0.5 * (1.0 + kappa) * gamma.eval(t)?;
        g.push(gv);
        h.push(hv);
        dg.push(-rate * gv);
        dh.push(c * rate * gv);
    }
    Ok((ScalarSamples::new(times.to_vec(), g, dg), ScalarSamples::new(times.to_vec(), h, dh)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{bloch_to_density, PureState};

    fn pc(g1: f64, g2: f64, g3: f64) -> GeneratorSpec {
        GeneratorSpec::PhaseCovariant(RateSet::constant(g1, g2, g3))
    }

    #[test]
    fn unital_fixed_point_is_annihilated() {
        let rho = DensityMatrix::maximally_mixed();
        let spec = GeneratorSpec::Pauli(RateSet::constant(0.7, 0.7, 0.7));
        assert!(evaluate_generator(&spec, &rho, 0.3).unwrap().max_abs_diff(&Mat2::zero()) < 1e-15);
        // ground state is the fixed point of pure decay
        let decay = pc(0.0, 1.3, 0.4);
        let l = evaluate_generator(&decay, &DensityMatrix::ground(), 1.0).unwrap();
        assert!(l.max_abs_diff(&Mat2::zero()) < 1e-15);
    }

    #[test]
    fn phase_covariant_on_excited_state_by_hand() {
        // Only the σ₋ term acts on |1⟩⟨1|: γ₂/2 (|0⟩⟨0| − |1⟩⟨1|).
        let l = evaluate_generator(&pc(1.0, 2.0, 3.0), &DensityMatrix::excited(), 0.0).unwrap();
        let expected = Mat2::from_real([[-1.0, 0.0], [0.0, 1.0]]);
        assert!(l.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn phase_covariant_matches_bloch_equations() {
        // brute force: compare with the transverse/longitudinal rate equations
        let (g1, g2, g3, w) = (0.4, 1.1, 0.3, 0.8);
        let mut rates = RateSet::constant(g1, g2, g3);
        rates.omega = RateFn::Constant(w);
        let spec = GeneratorSpec::PhaseCovariant(rates);
        let r = BlochVector::new(0.3, -0.4, 0.5);
        let l = spec.apply_matrix(&Mat2::from_pauli(1.0, r.to_array()).scale(0.5), 0.0).unwrap();
        let v = l.pauli_components();
        let gt = (g1 + g2) / 4.0 + g3;
        let expected = [
            -gt * r.x - 2.0 * w * r.y,
            -gt * r.y + 2.0 * w * r.x,
            (g1 - g2) / 2.0 - (g1 + g2) / 2.0 * r.z,
        ];
        for i in 0..3 {
            assert!((v[i] - expected[i]).abs() < 1e-15);
        }
        let via_affine = spec.bloch_velocity(r, 0.0).unwrap().to_array();
        for i in 0..3 {
            assert!((via_affine[i] - expected[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn jc_generator_on_excited_state() {
        let spec = GeneratorSpec::jaynes_cummings(0.1, 1.0).unwrap();
        let t = 1.7;
        let l = evaluate_generator(&spec, &DensityMatrix::excited(), t).unwrap();
        let gamma = jc::jc_rate(t, 0.1, 1.0).unwrap();
        let expected = Mat2::from_real([[-gamma, 0.0], [0.0, gamma]]);
        assert!(l.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn generic_lindblad_reproduces_named_families() {
        let (g1, g2, g3) = (0.2, 0.9, 0.35);
        let generic = GeneratorSpec::GenericLindblad(GenericLindblad {
            hamiltonian: vec![LindbladTerm { rate: RateFn::Constant(0.6), operator: Mat2::sigma_z() }],
            jumps: vec![
                LindbladTerm { rate: RateFn::Constant(g1 / 2.0), operator: Mat2::sigma_plus() },
                LindbladTerm { rate: RateFn::Constant(g2 / 2.0), operator: Mat2::sigma_minus() },
                LindbladTerm { rate: RateFn::Constant(g3 / 2.0), operator: Mat2::sigma_z() },
            ],
        });
        let mut rates = RateSet::constant(g1, g2, g3);
        rates.omega = RateFn::Constant(0.6);
        let named = GeneratorSpec::PhaseCovariant(rates);
        let a = generic.bloch_affine(0.0).unwrap();
        let b = named.bloch_affine(0.0).unwrap();
        for i in 0..3 {
            assert!((a.c[i] - b.c[i]).abs() < 1e-15);
            for j in 0..3 {
                assert!((a.m[i][j] - b.m[i][j]).abs() < 1e-15, "{i}{j}");
            }
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(GeneratorSpec::jaynes_cummings(0.0, 1.0).is_err());
        assert!(GeneratorSpec::jaynes_cummings(1.0, -1.0).is_err());
        let empty = GeneratorSpec::GenericLindblad(GenericLindblad { hamiltonian: vec![], jumps: vec![] });
        assert!(empty.validate().is_err());
        assert!(evaluate_generator(&pc(1.0, 1.0, 1.0), &DensityMatrix::excited(), -0.1).is_err());
        let bad = GeneratorSpec::PhaseCovariant(RateSet {
            gamma1: RateFn::Constant(f64::NAN),
            ..RateSet::constant(1.0, 1.0, 1.0)
        });
        assert!(bad.validate().is_err());
        assert!(evaluate_generator(&bad, &DensityMatrix::excited(), 0.1).is_err());
    }

    #[test]
    fn commutative_gh_closed_forms() {
        let one = RateFn::Constant(1.0);
        assert_eq!(commutative_pc_gh(0.0, 0.3, &one).unwrap(), (1.0, 0.0));
        let t = 2.0 * std::f64::consts::LN_2;
        let (g, h) = commutative_pc_gh(t, 0.0, &one).unwrap();
        assert!((g - 0.5).abs() < 1e-15 && (h - 0.5).abs() < 1e-15);
        let osc = RateFn::ExpSinusoid { decay: 0.0, offset: 1.0, sin_coeff: 0.0, cos_coeff: 2.0, frequency: 2.0 };
        for k in 0..30 {
            let t = 0.2 * k as f64;
            let (g, h) = commutative_pc_gh(t, 1.0, &osc).unwrap();
            assert_eq!(h, 0.0);
            // Γ = t + sin 2t ≥ 0
            assert!((g - (-(t + (2.0 * t).sin())).exp()).abs() < 1e-10);
            let (g, h) = commutative_pc_gh(t, 0.5, &osc).unwrap();
            assert!(g > 0.0 && g <= 1.0 && g + h.abs() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn generator_output_is_hermitian_traceless() {
        let specs = [
            pc(1.0, 2.0, 3.0),
            GeneratorSpec::Pauli(RateSet::constant(1.0, 2.0, 3.0)),
            GeneratorSpec::EternalNonMarkovian,
            GeneratorSpec::TimeDependentModel,
            GeneratorSpec::jaynes_cummings(0.3, 1.0).unwrap(),
        ];
        for spec in &specs {
            for k in 0..20 {
                let psi = PureState::new(k as f64 / 19.0, 0.37 * k as f64).unwrap();
                let rho = bloch_to_density(psi.bloch().scale(0.8)).unwrap();
                let l = evaluate_generator(spec, &rho, 0.13 * k as f64).unwrap();
                assert!(l.hermiticity_defect() < 1e-12);
                assert!(l.trace().norm() < 1e-12);
            }
        }
    }
}
