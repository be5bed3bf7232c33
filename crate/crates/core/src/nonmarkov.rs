//! BLP non-Markovianity and the phase-covariant rate criterion.
//!
//! For an affine Bloch map the trace distance of two evolved states is
//! `D(t) = ½ |A(t) (r₁ − r₂)|`, so the translation drops out and the measure of
//! a pair only depends on the direction and length of `r₁ − r₂`. `D` is
//! integrated as a signed smooth curve (sign flips where `A Δ` passes through
//! the origin), with monotone pieces located by bisection on the interpolated
//! derivative.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::jc;
use crate::propagation::{default_steps, extract_affine_map, AffineBlochMap};
use crate::quadrature::{bisect, golden_min, orient_magnitudes, ScalarSamples};
use crate::qubit::BlochVector;
use crate::rates::RateSet;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlpMethod {
    Analytic,
    NumericFixedPair,
    NumericPairSearch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlpResult {
    pub value: f64,
    /// Initial Bloch vectors of the pair attaining `value`.
    pub pair: (BlochVector, BlochVector),
    pub method: BlpMethod,
}

/// Signed `½|A(t) Δ|` with its derivative.
fn distance_samples(map: &AffineBlochMap, delta: [f64; 3]) -> ScalarSamples {
    let d = BlochVector::from_array(delta);
    let vecs: Vec<BlochVector> = (0..map.len()).map(|k| map.apply(k, d) - map.apply(k, BlochVector::zero())).collect();
    let signs = orient_magnitudes(&vecs.iter().map(|v| v.to_array()).collect::<Vec<_>>());
    let mut values = Vec::with_capacity(vecs.len());
    let mut derivs = Vec::with_capacity(vecs.len());
    for (k, (v, s)) in vecs.iter().zip(&signs).enumerate() {
        let dv = map.velocity(k, d) - map.velocity(k, BlochVector::zero());
        let n = v.norm();
        values.push(0.5 * s * n);
        derivs.push(if n > 0.0 { 0.5 * s * v.dot(&dv) / n } else { 0.5 * s * dv.norm() });
    }
    ScalarSamples::new(map.times.clone(), values, derivs)
}

/// `∫_{σ>0} σ dt` for the pair `(r1, r2)` from a precomputed map.
pub fn blp_pair_from_map(map: &AffineBlochMap, r1: BlochVector, r2: BlochVector) -> Result<f64> {
    let delta = r1 - r2;
    if delta.norm() <= tolerance::CONSTRUCTION {
        return Err(Error::IdenticalPair);
    }
    Ok(distance_samples(map, delta.to_array()).abs_positive_variation())
}

/// Integral of the positive part of `d/dt D(ρ₁(t), ρ₂(t))` over `(0, tau)`.
pub fn blp_pair(spec: &GeneratorSpec, r1: BlochVector, r2: BlochVector, tau: f64, steps: usize) -> Result<f64> {
    if (r1 - r2).norm() <= tolerance::CONSTRUCTION {
        return Err(Error::IdenticalPair);
    }
    let map = extract_affine_map(spec, tau, steps)?;
    blp_pair_from_map(&map, r1, r2)
}

/// `n` nearly uniform unit vectors on the sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            BlochVector::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Settings of the optimisation over initial pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSearch {
    /// Number of Fibonacci directions.
    pub resolution: usize,
    /// Local refinement levels around the best direction, each 4× finer.
    pub refinement_levels: usize,
    /// Finish with coordinate-wise golden-section searches in the tangent plane.
    pub polish: bool,
    /// Also scan non-antipodal pure pairs of the direction grid.
    pub full_pairs: bool,
    /// Grid steps for the map; `None` uses the default resolution.
    pub steps: Option<usize>,
}

impl Default for PairSearch {
    fn default() -> Self {
        PairSearch { resolution: 144, refinement_levels: 2, polish: true, full_pairs: false, steps: None }
    }
}

fn tangent_basis(n: BlochVector) -> (BlochVector, BlochVector) {
    let helper = if n.z.abs() < 0.9 { BlochVector::new(0.0, 0.0, 1.0) } else { BlochVector::new(1.0, 0.0, 0.0) };
    let e1 = helper.cross(&n).normalized();
    (e1, n.cross(&e1))
}

/// Best of `candidates` by value; ties keep the earliest candidate.
fn best_of(values: &[(BlochVector, f64)]) -> (BlochVector, f64) {
    values.iter().fold(values[0], |best, c| if c.1 > best.1 { *c } else { best })
}

/// BLP measure over antipodal pure pairs `±n`, from a precomputed map.
pub fn blp_measure_from_map(map: &AffineBlochMap, search: &PairSearch) -> Result<BlpResult> {
    if search.resolution == 0 {
        return Err(Error::InvalidArgument("pair search needs at least one direction".into()));
    }
    let eval = |n: &BlochVector| (*n, distance_samples(map, n.scale(2.0).to_array()).abs_positive_variation());
    let grid = fibonacci_sphere(search.resolution);
    let coarse: Vec<(BlochVector, f64)> = grid.par_iter().map(eval).collect();
    let (mut best_n, mut best) = best_of(&coarse);
    let spacing = (4.0 * std::f64::consts::PI / search.resolution as f64).sqrt();
    let mut step = spacing;
    for _ in 0..search.refinement_levels {
        step /= 4.0;
        let (e1, e2) = tangent_basis(best_n);
        let mut cells = Vec::with_capacity(25);
        for i in -2i32..=2 {
            for j in -2i32..=2 {
                cells.push((best_n + e1.scale(i as f64 * step) + e2.scale(j as f64 * step)).normalized());
            }
        }
        let local: Vec<(BlochVector, f64)> = cells.par_iter().map(eval).collect();
        let (n, v) = best_of(&local);
        if v > best {
            best_n = n;
            best = v;
        }
    }
    if search.polish {
        for _ in 0..3 {
            let (e1, e2) = tangent_basis(best_n);
            for e in [e1, e2] {
                let at = |u: f64| (best_n + e.scale(u)).normalized();
                let u = golden_min(|u| -eval(&at(u)).1, -2.0 * step, 2.0 * step, 1e-7);
                let (n, v) = eval(&at(u));
                if v > best {
                    best_n = n;
                    best = v;
                }
            }
        }
    }
    let mut pair = (best_n, -best_n);
    if search.full_pairs {
        let pairs: Vec<(usize, usize)> =
            (0..grid.len()).flat_map(|i| (i + 1..grid.len()).map(move |j| (i, j))).collect();
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| distance_samples(map, (grid[i] - grid[j]).to_array()).abs_positive_variation())
            .collect();
        for (&(i, j), &v) in pairs.iter().zip(&values) {
            if v > best {
                best = v;
                pair = (grid[i], grid[j]);
            }
        }
    }
    Ok(BlpResult { value: best, pair, method: BlpMethod::NumericPairSearch })
}

/// BLP measure `max ∫_{σ>0} σ dt` over antipodal pure pairs on `[0, tau]`.
pub fn blp_measure(spec: &GeneratorSpec, tau: f64, search: &PairSearch) -> Result<BlpResult> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("BLP measure needs tau > 0, got {tau}")));
    }
    let map = extract_affine_map(spec, tau, search.steps.unwrap_or_else(|| default_steps(tau)))?;
    blp_measure_from_map(&map, search)
}

/// BLP value of the `±z` pair for the Jaynes-Cummings model: the accumulated
/// increase of `|b_t|²` on `(0, tau)`.
pub fn blp_jc_analytic(tau: f64, gamma0: f64, lambda: f64) -> Result<f64> {
    let mut prev = jc::jc_b(0.0, gamma0, lambda)?.powi(2);
    let mut total = 0.0;
    let mut points = jc::extrema_of_b_squared(tau, gamma0, lambda);
    points.push(tau);
    for t in points {
        let v = jc::jc_b(t, gamma0, lambda)?.powi(2);
        total += (v - prev).max(0.0);
        prev = v;
    }
    Ok(total)
}

/// BLP measure of the Jaynes-Cummings model, attained by equatorial pairs:
/// the accumulated increase of `|b_t|` on `(0, tau)`.
pub fn blp_jc_equatorial(tau: f64, gamma0: f64, lambda: f64) -> Result<f64> {
    let mut prev = jc::jc_b(0.0, gamma0, lambda)?.abs();
    let mut total = 0.0;
    let mut points = jc::extrema_of_b_squared(tau, gamma0, lambda);
    points.push(tau);
    for t in points {
        let v = jc::jc_b(t, gamma0, lambda)?.abs();
        total += (v - prev).max(0.0);
        prev = v;
    }
    Ok(total)
}

/// `∫_{d|g|/dt>0} d|g|/dt dt`: the BLP value of the `±z` pair for a map whose
/// `z` block is `z ↦ g z + h`.
pub fn blp_from_deformation(g: &ScalarSamples) -> f64 {
    g.abs_positive_variation()
}

/// Signed boundary values of the phase-covariant rate criterion at time `t`,
/// with `γ′ = γ₁ + γ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionFlags {
    pub t: f64,
    /// `γ′ + 4γ₃`; negative exactly when the BLP measure grows.
    pub blp_boundary: f64,
    /// `γ′ + 2γ₃`.
    pub secondary_boundary: f64,
    /// `γ′`; negative means no semigroup-like population decay.
    pub semigroup_boundary: f64,
}

impl RegionFlags {
    pub fn blp_non_markovian(&self) -> bool {
        self.blp_boundary < 0.0
    }

    pub fn value(&self, boundary: Boundary) -> f64 {
        match boundary {
            Boundary::Blp => self.blp_boundary,
            Boundary::Secondary => self.secondary_boundary,
            Boundary::Semigroup => self.semigroup_boundary,
        }
    }
}

pub fn pc_blp_criterion(rates: &RateSet, t: f64) -> Result<RegionFlags> {
    let [g1, g2, g3, _] = rates.eval(t)?;
    let gp = g1 + g2;
    Ok(RegionFlags { t, blp_boundary: gp + 4.0 * g3, secondary_boundary: gp + 2.0 * g3, semigroup_boundary: gp })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Blp,
    Secondary,
    Semigroup,
}

impl Boundary {
    pub const ALL: [Boundary; 3] = [Boundary::Blp, Boundary::Secondary, Boundary::Semigroup];

    pub fn name(self) -> &'static str {
        match self {
            Boundary::Blp => "blp",
            Boundary::Secondary => "secondary",
            Boundary::Semigroup => "semigroup",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub boundary: Boundary,
    pub t: f64,
    /// `false` for a sign change, `true` when the boundary is only touched.
    pub touch: bool,
}

/// Times in `(0, tau]` where each boundary value vanishes, from `samples`
/// uniform samples refined by bisection (sign changes) or golden-section
/// minimisation of `|f|` (touching zeros).
pub fn boundary_crossings(rates: &RateSet, tau: f64, samples: usize) -> Result<Vec<Crossing>> {
    if !(tau > 0.0) || samples < 3 {
        return Err(Error::InvalidArgument("boundary scan needs tau > 0 and at least 3 samples".into()));
    }
    let times: Vec<f64> = (0..=samples).map(|k| tau * k as f64 / samples as f64).collect();
    let flags: Vec<RegionFlags> = times.iter().map(|&t| pc_blp_criterion(rates, t)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for boundary in Boundary::ALL {
        let f = |t: f64| pc_blp_criterion(rates, t).map(|r| r.value(boundary)).unwrap_or(f64::NAN);
        let vals: Vec<f64> = flags.iter().map(|r| r.value(boundary)).collect();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for k in 1..vals.len() {
            let (t0, t1) = (times[k - 1], times[k]);
            if vals[k] == 0.0 {
                out.push(Crossing { boundary, t: t1, touch: k + 1 < vals.len() && vals[k - 1] * vals[k + 1] > 0.0 });
            } else if vals[k - 1] * vals[k] < 0.0 {
                out.push(Crossing { boundary, t: bisect(f, t0, t1, tolerance::BISECTION_TIME), touch: false });
            } else if k + 1 < vals.len()
                && vals[k - 1] * vals[k + 1] > 0.0
                && vals[k].abs() <= vals[k - 1].abs()
                && vals[k].abs() <= vals[k + 1].abs()
            {
                let t = golden_min(|t| f(t).abs(), t0, times[k + 1], tolerance::BISECTION_TIME);
                if f(t).abs() <= tolerance::CROSS_CHECK * scale {
                    out.push(Crossing { boundary, t, touch: true });
                }
            }
        }
    }
    out.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    out.dedup_by(|a, b| a.boundary == b.boundary && (a.t - b.t).abs() <= 1e-8);
    Ok(out)
}

/// Rate-sign indicator of non-CP-divisibility: some rate is negative at a
/// sampled time.
pub fn has_negative_rate_on(spec: &GeneratorSpec, times: &[f64]) -> Result<bool> {
    for &t in times {
        if spec.has_negative_rate(t)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(s: f64) -> BlochVector {
        BlochVector::new(0.0, 0.0, s)
    }

    #[test]
    fn identical_pair_rejected() {
        let spec = GeneratorSpec::Pauli(RateSet::constant(1.0, 1.0, 1.0));
        assert!(matches!(blp_pair(&spec, z(1.0), z(1.0), 1.0, 64), Err(Error::IdenticalPair)));
    }

    #[test]
    fn semigroup_pairs_are_markovian() {
        let spec = GeneratorSpec::PhaseCovariant(RateSet::constant(1.0, 2.0, 3.0));
        for n in fibonacci_sphere(20) {
            let v = blp_pair(&spec, n, BlochVector::new(0.1, -0.2, 0.3), 3.0, 2048).unwrap();
            assert!(v < 1e-8, "{v}");
        }
    }

    #[test]
    fn jc_pair_matches_analytic() {
        for tau in [0.5, 2.0, 5.0, 9.0] {
            let numeric = blp_pair(&GeneratorSpec::jaynes_cummings(5.0, 1.0).unwrap(), z(1.0), z(-1.0), tau, default_steps(tau))
                .unwrap();
            let analytic = blp_jc_analytic(tau, 5.0, 1.0).unwrap();
            assert!((numeric - analytic).abs() < 1e-6, "tau={tau}: {numeric} vs {analytic}");
        }
        assert!(blp_jc_analytic(5.0, 5.0, 1.0).unwrap() > 0.0);
        assert_eq!(blp_jc_analytic(0.0, 5.0, 1.0).unwrap(), 0.0);
        assert_eq!(blp_jc_analytic(30.0, 0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn jc_analytic_matches_integral_form() {
        // ½∫|∂ₜ b²| + ½(b_τ² − 1) by brute-force quadrature of |2bḃ|
        let (g0, l, tau) = (5.0, 1.0, 6.0);
        let f = |t: f64| (2.0 * jc::jc_b(t, g0, l).unwrap() * jc::jc_b_dot(t, g0, l).unwrap()).abs();
        let mut cuts = vec![0.0];
        cuts.extend(jc::extrema_of_b_squared(tau, g0, l));
        cuts.push(tau);
        let integral: f64 = cuts.windows(2).map(|w| crate::quadrature::adaptive_simpson(&f, w[0], w[1], 1e-13)).sum();
        let bt = jc::jc_b(tau, g0, l).unwrap();
        let expected = 0.5 * integral + 0.5 * (bt * bt - 1.0);
        assert!((blp_jc_analytic(tau, g0, l).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn jc_onset_at_critical_coupling() {
        let tau = 2.5 * jc::first_zero(0.55, 1.0).unwrap();
        let search = PairSearch { resolution: 48, refinement_levels: 1, ..PairSearch::default() };
        let below = blp_measure(&GeneratorSpec::jaynes_cummings(0.5, 1.0).unwrap(), tau, &search).unwrap();
        let above = blp_measure(&GeneratorSpec::jaynes_cummings(0.55, 1.0).unwrap(), tau, &search).unwrap();
        assert!(below.value < 1e-9, "{}", below.value);
        assert!(above.value > 1e-6, "{}", above.value);
    }

    #[test]
    fn jc_optimal_pair_is_equatorial() {
        // D = |b|·√(1 − n_z²(1 − b²)) is largest for n_z = 0
        let spec = GeneratorSpec::jaynes_cummings(5.0, 1.0).unwrap();
        let r = blp_measure(&spec, 5.0, &PairSearch::default()).unwrap();
        assert!(r.pair.0.z.abs() < 0.05, "{:?}", r.pair);
        let equatorial = blp_pair(&spec, BlochVector::new(1.0, 0.0, 0.0), BlochVector::new(-1.0, 0.0, 0.0), 5.0, 10240).unwrap();
        assert!((r.value - equatorial).abs() < 1e-6);
        assert!(r.value >= blp_jc_analytic(5.0, 5.0, 1.0).unwrap());
        assert!((equatorial - blp_jc_equatorial(5.0, 5.0, 1.0).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn search_dominates_probes() {
        let spec = GeneratorSpec::TimeDependentModel;
        let tau = 4.0;
        let map = extract_affine_map(&spec, tau, default_steps(tau)).unwrap();
        let best = blp_measure_from_map(&map, &PairSearch::default()).unwrap().value;
        for n in fibonacci_sphere(31) {
            let probe = blp_pair_from_map(&map, n, -n).unwrap();
            assert!(best >= probe - 1e-6);
        }
        let full = blp_measure_from_map(&map, &PairSearch { resolution: 24, full_pairs: true, ..PairSearch::default() })
            .unwrap()
            .value;
        assert!(full <= best + 1e-6);
    }

    #[test]
    fn eternal_model_is_blp_markovian() {
        let r = blp_measure(&GeneratorSpec::EternalNonMarkovian, 4.0, &PairSearch::default()).unwrap();
        assert!(r.value < 1e-6, "{}", r.value);
        let times: Vec<f64> = (1..40).map(|k| 0.1 * k as f64).collect();
        assert!(has_negative_rate_on(&GeneratorSpec::EternalNonMarkovian, &times).unwrap());
    }

    #[test]
    fn commutative_pc_blp_from_deformation() {
        let gamma = crate::rates::RateFn::ExpSinusoid {
            decay: 0.0,
            offset: 1.0,
            sin_coeff: 0.0,
            cos_coeff: 2.0,
            frequency: 2.0,
        };
        let spec = GeneratorSpec::PhaseCovariant(RateSet::commutative(0.5, gamma, crate::rates::RateFn::zero()));
        let map = extract_affine_map(&spec, 6.0, default_steps(6.0)).unwrap();
        let analytic = blp_from_deformation(&map.g());
        let numeric = blp_pair_from_map(&map, z(1.0), z(-1.0)).unwrap();
        assert!(analytic > 0.0);
        assert!((analytic - numeric).abs() < 1e-6);
    }

    #[test]
    fn criterion_for_time_dependent_model() {
        let rates = RateSet::time_dependent_model();
        let at0 = pc_blp_criterion(&rates, 0.0).unwrap();
        assert!((at0.blp_boundary - 10.0).abs() < 1e-15 && !at0.blp_non_markovian());
        let t = 2.0 * (5.0f64 / 3.0).atan();
        assert!(pc_blp_criterion(&rates, t).unwrap().blp_boundary.abs() < 1e-14);
        assert!(pc_blp_criterion(&rates, 2.3).unwrap().blp_non_markovian());
        for k in 0..200 {
            let t = 0.05 * k as f64;
            let flags = pc_blp_criterion(&rates, t).unwrap();
            let reduced = 1.0 + t.sin() + 4.0 * t.cos();
            assert_eq!(flags.blp_boundary < 0.0, reduced < 0.0, "t={t}");
        }
    }

    #[test]
    fn crossings_of_time_dependent_model() {
        let rates = RateSet::time_dependent_model();
        let cs = boundary_crossings(&rates, 5.0, 500).unwrap();
        let find = |b: Boundary| cs.iter().find(|c| c.boundary == b).copied().unwrap();
        assert!((find(Boundary::Blp).t - 2.0 * (5.0f64 / 3.0).atan()).abs() < 1e-9);
        assert!((find(Boundary::Secondary).t - 2.0 * 3f64.atan()).abs() < 1e-9);
        let semi = find(Boundary::Semigroup);
        assert!(semi.touch);
        assert!((semi.t - 1.5 * std::f64::consts::PI).abs() < 1e-6, "{}", semi.t);
    }

    #[test]
    fn blp_equivalence_with_criterion() {
        let spec = GeneratorSpec::TimeDependentModel;
        let rates = RateSet::time_dependent_model();
        let search = PairSearch { resolution: 48, refinement_levels: 1, ..PairSearch::default() };
        for tau in [1.0, 1.8, 2.2, 3.0, 5.0] {
            let blp = blp_measure(&spec, tau, &search).unwrap().value;
            let fires = (1..1000).any(|k| pc_blp_criterion(&rates, tau * k as f64 / 1000.0).unwrap().blp_non_markovian());
            assert_eq!(blp > 1e-6, fires, "tau={tau} blp={blp}");
        }
    }
}
