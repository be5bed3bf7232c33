//! State trajectories and the affine Bloch decomposition `r(t) = A(t) r(0) + s(t)`.
//!
//! Closed forms are used where they exist:
//!
//! * Jaynes-Cummings: `A = diag(b, b, b²)`, `s = (0, 0, b² − 1)`;
//! * Pauli (incl. the eternal model): diagonal `A` with exponents
//!   `−2∫(γ₂+γ₃)`, `−2∫(γ₁+γ₃)`, `−2∫(γ₁+γ₂)` and `s = 0`;
//! * phase-covariant with `γ₁ − γ₂ = c (γ₁ + γ₂)` (constant or commutative
//!   rates): damped rotation `e^{−Γ⊥}R(2Ω)` in the transverse plane and
//!   `z = e^{−Γz} z₀ + c (1 − e^{−Γz})`.
//!
//! Everything else is integrated with fixed-step RK4 in Bloch coordinates,
//! with a Richardson error estimate from a half-resolution run.

use crate::error::{Error, Result};
use crate::generator::{BlochAffine, GeneratorSpec};
use crate::jc;
use crate::quadrature::ScalarSamples;
use crate::qubit::{bloch_to_density, BlochVector, DensityMatrix};
use crate::rates::RateSet;
use crate::tolerance;

/// Default resolution of the propagation grid.
pub const DEFAULT_STEPS_PER_UNIT: usize = 2048;
/// Smallest accepted number of steps.
pub const MIN_STEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Numeric,
}

type Mat3 = [[f64; 3]; 3];
/// Solution samples, their velocities and the Richardson error estimate.
type Solution = (Vec<[f64; 3]>, Vec<[f64; 3]>, f64);

const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn mat_vec(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Number of steps used when none is configured: 2048 per unit time, even, at least 16.
pub fn default_steps(tau: f64) -> usize {
    let n = (DEFAULT_STEPS_PER_UNIT as f64 * tau).ceil() as usize;
    let n = n.max(MIN_STEPS);
    n + n % 2
}

/// `steps + 1` equally spaced times on `[0, tau]`.
pub fn uniform_grid(tau: f64, steps: usize) -> Vec<f64> {
    let h = tau / steps as f64;
    (0..=steps).map(|k| if k == steps { tau } else { k as f64 * h }).collect()
}

fn check_request(tau: f64, steps: usize) -> Result<usize> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("evolution time must be finite and non-negative, got {tau}")));
    }
    if steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!("at least {MIN_STEPS} steps are required, got {steps}")));
    }
    Ok(steps + steps % 2)
}

/// A sampled solution `r(t)` of the master equation together with `ṙ(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub bloch: Vec<BlochVector>,
    pub velocity: Vec<BlochVector>,
    pub method: Method,
    pub spec: GeneratorSpec,
    /// Richardson error estimate of the integrator, zero for closed forms.
    pub error_estimate: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn tau(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Uniform step, zero for a single-point trajectory.
    pub fn step(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn state(&self, k: usize) -> Result<DensityMatrix> {
        bloch_to_density(self.bloch[k])
    }

    pub fn states(&self) -> Result<Vec<DensityMatrix>> {
        self.bloch.iter().map(|r| bloch_to_density(*r)).collect()
    }

    pub fn final_bloch(&self) -> BlochVector {
        self.bloch[self.bloch.len() - 1]
    }

    /// `n · r(t)` with derivative `n · ṙ(t)`.
    pub fn projection(&self, n: BlochVector) -> ScalarSamples {
        ScalarSamples::new(
            self.times.clone(),
            self.bloch.iter().map(|r| r.dot(&n)).collect(),
            self.velocity.iter().map(|v| v.dot(&n)).collect(),
        )
    }
}

/// Samples of `A(t)`, `s(t)` and their time derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineBlochMap {
    pub times: Vec<f64>,
    pub a: Vec<Mat3>,
    pub s: Vec<[f64; 3]>,
    pub a_dot: Vec<Mat3>,
    pub s_dot: Vec<[f64; 3]>,
    pub method: Method,
    pub error_estimate: f64,
}

impl AffineBlochMap {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `A(tₖ) r + s(tₖ)`.
    pub fn apply(&self, k: usize, r: BlochVector) -> BlochVector {
        BlochVector::from_array(add3(mat_vec(&self.a[k], r.to_array()), self.s[k]))
    }

    /// `Ȧ(tₖ) r + ṡ(tₖ)`.
    pub fn velocity(&self, k: usize, r: BlochVector) -> BlochVector {
        BlochVector::from_array(add3(mat_vec(&self.a_dot[k], r.to_array()), self.s_dot[k]))
    }

    /// Trajectory of the initial Bloch vector `r0` under this map.
    pub fn trajectory(&self, spec: &GeneratorSpec, r0: BlochVector) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            bloch: (0..self.len()).map(|k| self.apply(k, r0)).collect(),
            velocity: (0..self.len()).map(|k| self.velocity(k, r0)).collect(),
            method: self.method,
            spec: spec.clone(),
            error_estimate: self.error_estimate,
        }
    }

    /// Deformation `g(t) = A₃₃(t)`.
    pub fn g(&self) -> ScalarSamples {
        self.axis_g(BlochVector::new(0.0, 0.0, 1.0))
    }

    /// Translation `h(t) = s₃(t)`.
    pub fn h(&self) -> ScalarSamples {
        self.axis_h(BlochVector::new(0.0, 0.0, 1.0))
    }

    /// `nᵀA(t)n` for a unit axis `n`: the deformation seen by the pair `±n`.
    pub fn axis_g(&self, n: BlochVector) -> ScalarSamples {
        let n = n.to_array();
        let quad = |m: &Mat3| mat_vec(m, n).iter().zip(&n).map(|(a, b)| a * b).sum();
        ScalarSamples::new(
            self.times.clone(),
            self.a.iter().map(quad).collect(),
            self.a_dot.iter().map(quad).collect(),
        )
    }

    /// `n · s(t)` for a unit axis `n`.
    pub fn axis_h(&self, n: BlochVector) -> ScalarSamples {
        let n = n.to_array();
        let dot = |v: &[f64; 3]| v.iter().zip(&n).map(|(a, b)| a * b).sum();
        ScalarSamples::new(
            self.times.clone(),
            self.s.iter().map(dot).collect(),
            self.s_dot.iter().map(dot).collect(),
        )
    }

    /// Restriction to the first `k + 1` samples.
    pub fn prefix(&self, k: usize) -> AffineBlochMap {
        AffineBlochMap {
            times: self.times[..=k].to_vec(),
            a: self.a[..=k].to_vec(),
            s: self.s[..=k].to_vec(),
            a_dot: self.a_dot[..=k].to_vec(),
            s_dot: self.s_dot[..=k].to_vec(),
            method: self.method,
            error_estimate: self.error_estimate,
        }
    }
}

/// Trajectory of `rho0` on `[0, tau]` with `steps` uniform steps (rounded up to even).
///
/// `tau = 0` yields a single-point trajectory.
pub fn propagate(spec: &GeneratorSpec, rho0: &DensityMatrix, tau: f64, steps: usize) -> Result<Trajectory> {
    spec.validate()?;
    let steps = check_request(tau, steps)?;
    let r0 = rho0.bloch();
    if tau == 0.0 {
        return single_point(spec, r0);
    }
    let times = uniform_grid(tau, steps);
    if let Some(map) = analytic_map(spec, &times) {
        return Ok(map?.trajectory(spec, r0));
    }
    numeric_trajectory(spec, r0, &times)
}

/// As [`propagate`] but always with the RK4 integrator.
pub fn propagate_numeric(spec: &GeneratorSpec, rho0: &DensityMatrix, tau: f64, steps: usize) -> Result<Trajectory> {
    spec.validate()?;
    let steps = check_request(tau, steps)?;
    let r0 = rho0.bloch();
    if tau == 0.0 {
        return single_point(spec, r0);
    }
    numeric_trajectory(spec, r0, &uniform_grid(tau, steps))
}

/// Affine decomposition of the dynamical map on `[0, tau]`.
///
/// `s` comes from propagating `r(0) = 0`; column `j` of `A` from propagating
/// the unit vector `eⱼ` and subtracting `s`.
pub fn extract_affine_map(spec: &GeneratorSpec, tau: f64, steps: usize) -> Result<AffineBlochMap> {
    spec.validate()?;
    let steps = check_request(tau, steps)?;
    if tau == 0.0 {
        let affine = spec.bloch_affine(0.0)?;
        return Ok(AffineBlochMap {
            times: vec![0.0],
            a: vec![IDENTITY3],
            s: vec![[0.0; 3]],
            a_dot: vec![affine.m],
            s_dot: vec![affine.c],
            method: Method::Analytic,
            error_estimate: 0.0,
        });
    }
    let times = uniform_grid(tau, steps);
    if let Some(map) = analytic_map(spec, &times) {
        return map;
    }
    numeric_map(spec, &times)
}

/// As [`extract_affine_map`] but always with the RK4 integrator.
pub fn extract_affine_map_numeric(spec: &GeneratorSpec, tau: f64, steps: usize) -> Result<AffineBlochMap> {
    spec.validate()?;
    let steps = check_request(tau, steps)?;
    numeric_map(spec, &uniform_grid(tau, steps))
}

fn single_point(spec: &GeneratorSpec, r0: BlochVector) -> Result<Trajectory> {
    Ok(Trajectory {
        times: vec![0.0],
        bloch: vec![r0],
        velocity: vec![spec.bloch_velocity(r0, 0.0)?],
        method: Method::Analytic,
        spec: spec.clone(),
        error_estimate: 0.0,
    })
}

fn analytic_map(spec: &GeneratorSpec, times: &[f64]) -> Option<Result<AffineBlochMap>> {
    match spec {
        GeneratorSpec::JaynesCummings { gamma0, lambda } => Some(jc_map(*gamma0, *lambda, times)),
        GeneratorSpec::Pauli(_) | GeneratorSpec::EternalNonMarkovian => {
            Some(pauli_map(spec, &spec.pauli_rates().expect("Pauli family"), times))
        }
        GeneratorSpec::PhaseCovariant(_) | GeneratorSpec::TimeDependentModel => {
            let rates = spec.phase_covariant_rates().expect("phase-covariant family");
            let c = rates.pump_decay_balance()?;
            Some(phase_covariant_map(spec, &rates, c, times))
        }
        GeneratorSpec::GenericLindblad(_) => None,
    }
}

fn jc_map(gamma0: f64, lambda: f64, times: &[f64]) -> Result<AffineBlochMap> {
    let mut map = empty_map(times, Method::Analytic);
    for (k, &t) in times.iter().enumerate() {
        let b = jc::jc_b(t, gamma0, lambda)?;
        let db = jc::jc_b_dot(t, gamma0, lambda)?;
        map.a[k] = [[b, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, b * b]];
        map.s[k] = [0.0, 0.0, b * b - 1.0];
        map.a_dot[k] = [[db, 0.0, 0.0], [0.0, db, 0.0], [0.0, 0.0, 2.0 * b * db]];
        map.s_dot[k] = [0.0, 0.0, 2.0 * b * db];
    }
    Ok(map)
}

fn pauli_map(spec: &GeneratorSpec, rates: &RateSet, times: &[f64]) -> Result<AffineBlochMap> {
    let i1 = rates.gamma1.cumulative(times)?;
    let i2 = rates.gamma2.cumulative(times)?;
    let i3 = rates.gamma3.cumulative(times)?;
    let mut map = empty_map(times, Method::Analytic);
    for k in 0..times.len() {
        let ex = (-2.0 * (i2[k] + i3[k])).exp();
        let ey = (-2.0 * (i1[k] + i3[k])).exp();
        let ez = (-2.0 * (i1[k] + i2[k])).exp();
        map.a[k] = [[ex, 0.0, 0.0], [0.0, ey, 0.0], [0.0, 0.0, ez]];
        fill_derivatives(&mut map, k, &spec.bloch_affine(times[k])?);
    }
    check_finite(&map)?;
    Ok(map)
}

fn phase_covariant_map(spec: &GeneratorSpec, rates: &RateSet, c: f64, times: &[f64]) -> Result<AffineBlochMap> {
    let i1 = rates.gamma1.cumulative(times)?;
    let i2 = rates.gamma2.cumulative(times)?;
    let i3 = rates.gamma3.cumulative(times)?;
    let iw = rates.omega.cumulative(times)?;
    let mut map = empty_map(times, Method::Analytic);
    for k in 0..times.len() {
        let gz = 0.5 * (i1[k] + i2[k]);
        let gt = 0.5 * gz + i3[k];
        let e = (-gt).exp();
        let (sn, cs) = (2.0 * iw[k]).sin_cos();
        let g = (-gz).exp();
        map.a[k] = [[e * cs, -e * sn, 0.0], [e * sn, e * cs, 0.0], [0.0, 0.0, g]];
        map.s[k] = [0.0, 0.0, c * (1.0 - g)];
        fill_derivatives(&mut map, k, &spec.bloch_affine(times[k])?);
    }
    check_finite(&map)?;
    Ok(map)
}

/// `Ȧ = M A`, `ṡ = M s + c`.
fn fill_derivatives(map: &mut AffineBlochMap, k: usize, affine: &BlochAffine) {
    map.a_dot[k] = mat_mul(&affine.m, &map.a[k]);
    map.s_dot[k] = affine.apply(map.s[k]);
}

fn empty_map(times: &[f64], method: Method) -> AffineBlochMap {
    let n = times.len();
    AffineBlochMap {
        times: times.to_vec(),
        a: vec![IDENTITY3; n],
        s: vec![[0.0; 3]; n],
        a_dot: vec![[[0.0; 3]; 3]; n],
        s_dot: vec![[0.0; 3]; n],
        method,
        error_estimate: 0.0,
    }
}

fn check_finite(map: &AffineBlochMap) -> Result<()> {
    for k in 0..map.len() {
        let finite = map.a[k].iter().chain(&map.a_dot[k]).flatten().all(|x| x.is_finite())
            && map.s[k].iter().chain(&map.s_dot[k]).all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFiniteRate { t: map.times[k] });
        }
    }
    Ok(())
}

/// Generator samples at grid points and interval midpoints.
struct GridGenerator {
    times: Vec<f64>,
    at_nodes: Vec<BlochAffine>,
    at_mid: Vec<BlochAffine>,
}

impl GridGenerator {
    fn new(spec: &GeneratorSpec, times: &[f64]) -> Result<Self> {
        if let GeneratorSpec::JaynesCummings { gamma0, lambda } = spec {
            if let Some(t0) = jc::first_zero(*gamma0, *lambda) {
                if t0 <= times[times.len() - 1] {
                    return Err(Error::RatePole { t: t0, sign: '+' });
                }
            }
        }
        let at_nodes = times.iter().map(|&t| spec.bloch_affine(t)).collect::<Result<Vec<_>>>()?;
        let at_mid = times
            .windows(2)
            .map(|w| spec.bloch_affine(0.5 * (w[0] + w[1])))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridGenerator { times: times.to_vec(), at_nodes, at_mid })
    }

    /// Generator at the start, middle and end of RK4 step `j` of stride `stride`.
    fn stage(&self, j: usize, stride: usize) -> (&BlochAffine, &BlochAffine, &BlochAffine) {
        let k0 = j * stride;
        let k1 = k0 + stride;
        let mid = if stride == 1 { &self.at_mid[k0] } else { &self.at_nodes[k0 + stride / 2] };
        (&self.at_nodes[k0], mid, &self.at_nodes[k1])
    }

    /// RK4 from `r0` with every `stride`-th grid point as a step boundary.
    fn integrate(&self, r0: [f64; 3], stride: usize) -> Vec<[f64; 3]> {
        let steps = (self.times.len() - 1) / stride;
        let mut out = Vec::with_capacity(steps + 1);
        let mut r = r0;
        out.push(r);
        for j in 0..steps {
            let h = self.times[(j + 1) * stride] - self.times[j * stride];
            let (f0, fm, f1) = self.stage(j, stride);
            let k1 = f0.apply(r);
            let k2 = fm.apply(axpy(r, 0.5 * h, k1));
            let k3 = fm.apply(axpy(r, 0.5 * h, k2));
            let k4 = f1.apply(axpy(r, h, k3));
            for i in 0..3 {
                r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            out.push(r);
        }
        out
    }

    /// Full-resolution solution, its velocities and the Richardson estimate.
    fn solve(&self, r0: [f64; 3]) -> Result<Solution> {
        let fine = self.integrate(r0, 1);
        let coarse = self.integrate(r0, 2);
        let mut estimate: f64 = 0.0;
        for (j, rc) in coarse.iter().enumerate() {
            let rf = fine[2 * j];
            let d = ((rf[0] - rc[0]).powi(2) + (rf[1] - rc[1]).powi(2) + (rf[2] - rc[2]).powi(2)).sqrt();
            estimate = estimate.max(d / 15.0);
        }
        if !(estimate <= tolerance::RICHARDSON_MAX) {
            return Err(Error::StepSizeTooLarge { estimate, steps: self.times.len() - 1 });
        }
        let vel = fine.iter().zip(&self.at_nodes).map(|(r, f)| f.apply(*r)).collect();
        Ok((fine, vel, estimate))
    }
}

fn axpy(r: [f64; 3], a: f64, k: [f64; 3]) -> [f64; 3] {
    [r[0] + a * k[0], r[1] + a * k[1], r[2] + a * k[2]]
}

fn check_drift(times: &[f64], bloch: &[[f64; 3]]) -> Result<()> {
    for (t, r) in times.iter().zip(bloch) {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !(norm <= 1.0 + tolerance::HARD_DRIFT) {
            return Err(Error::StateDrift { t: *t, norm });
        }
    }
    Ok(())
}

fn numeric_trajectory(spec: &GeneratorSpec, r0: BlochVector, times: &[f64]) -> Result<Trajectory> {
    let grid = GridGenerator::new(spec, times)?;
    let (bloch, vel, estimate) = grid.solve(r0.to_array())?;
    check_drift(times, &bloch)?;
    Ok(Trajectory {
        times: times.to_vec(),
        bloch: bloch.into_iter().map(BlochVector::from_array).collect(),
        velocity: vel.into_iter().map(BlochVector::from_array).collect(),
        method: Method::Numeric,
        spec: spec.clone(),
        error_estimate: estimate,
    })
}

fn numeric_map(spec: &GeneratorSpec, times: &[f64]) -> Result<AffineBlochMap> {
    let grid = GridGenerator::new(spec, times)?;
    let mut map = empty_map(times, Method::Numeric);
    let (s, s_dot, e0) = grid.solve([0.0; 3])?;
    check_drift(times, &s)?;
    map.s = s;
    map.s_dot = s_dot;
    let mut estimate = e0;
    for j in 0..3 {
        let mut unit = [0.0; 3];
        unit[j] = 1.0;
        let (r, v, e) = grid.solve(unit)?;
        check_drift(times, &r)?;
        estimate = estimate.max(e);
        for k in 0..times.len() {
            for i in 0..3 {
                map.a[k][i][j] = r[k][i] - map.s[k][i];
                map.a_dot[k][i][j] = v[k][i] - map.s_dot[k][i];
            }
        }
    }
    map.error_estimate = estimate;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{GenericLindblad, LindbladTerm};
    use crate::qubit::{trace_distance, Mat2, PureState};
    use crate::rates::RateFn;

    fn max_trace_distance(a: &Trajectory, b: &Trajectory) -> f64 {
        a.bloch.iter().zip(&b.bloch).map(|(x, y)| (*x - *y).norm() / 2.0).fold(0.0, f64::max)
    }

    #[test]
    fn grid_and_defaults() {
        assert_eq!(default_steps(1.0), 2048);
        assert_eq!(default_steps(0.001), 16);
        assert_eq!(default_steps(0.0101) % 2, 0);
        let g = uniform_grid(3.0, 6);
        assert_eq!(g.len(), 7);
        assert_eq!(g[6], 3.0);
    }

    #[test]
    fn zero_time_gives_single_point() {
        let spec = GeneratorSpec::EternalNonMarkovian;
        let rho = PureState::new(0.3, 1.0).unwrap().density();
        let tr = propagate(&spec, &rho, 0.0, 16).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.bloch[0], rho.bloch());
        assert!(propagate(&spec, &rho, -1.0, 16).is_err());
        assert!(propagate(&spec, &rho, 1.0, 8).is_err());
    }

    #[test]
    fn tiny_time_is_nearly_constant() {
        let spec = GeneratorSpec::Pauli(RateSet::constant(1.0, 2.0, 3.0));
        let rho = PureState::new(0.3, 0.4).unwrap().density();
        let tr = propagate_numeric(&spec, &rho, 1e-6, 16).unwrap();
        let last = tr.state(tr.len() - 1).unwrap();
        assert!(trace_distance(&rho, &last) < 1e-5);
    }

    #[test]
    fn jc_excited_population_is_b_squared() {
        let spec = GeneratorSpec::jaynes_cummings(0.1, 1.0).unwrap();
        let tr = propagate(&spec, &DensityMatrix::excited(), 10.0, 2048 * 10).unwrap();
        for (t, r) in tr.times.iter().zip(&tr.bloch) {
            let b = jc::jc_b(*t, 0.1, 1.0).unwrap();
            assert!(((1.0 + r.z) / 2.0 - b * b).abs() < 1e-8);
        }
        let num = propagate_numeric(&spec, &DensityMatrix::excited(), 10.0, 2048 * 10).unwrap();
        for (t, r) in num.times.iter().zip(&num.bloch) {
            let b = jc::jc_b(*t, 0.1, 1.0).unwrap();
            assert!(((1.0 + r.z) / 2.0 - b * b).abs() < 1e-8);
        }
    }

    #[test]
    fn eternal_transverse_factor() {
        let rho = PureState::new(0.5, 0.0).unwrap().density();
        for tr in [
            propagate(&GeneratorSpec::EternalNonMarkovian, &rho, 5.0, 2048 * 5).unwrap(),
            propagate_numeric(&GeneratorSpec::EternalNonMarkovian, &rho, 5.0, 2048 * 5).unwrap(),
        ] {
            for (t, r) in tr.times.iter().zip(&tr.bloch) {
                assert!((r.x - 0.5 * (1.0 + (-2.0 * t).exp())).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn numeric_jc_refuses_poles() {
        let spec = GeneratorSpec::jaynes_cummings(5.0, 1.0).unwrap();
        let err = propagate_numeric(&spec, &DensityMatrix::excited(), 5.0, 4096).unwrap_err();
        assert!(matches!(err, Error::RatePole { .. }));
        // the closed form has no trouble
        assert!(propagate(&spec, &DensityMatrix::excited(), 5.0, 4096).is_ok());
    }

    #[test]
    fn coarse_grid_is_refused() {
        let spec = GeneratorSpec::Pauli(RateSet::constant(40.0, 50.0, 60.0));
        let rho = PureState::new(0.3, 0.0).unwrap().density();
        let err = propagate_numeric(&spec, &rho, 1.0, 16).unwrap_err();
        assert!(matches!(err, Error::StepSizeTooLarge { .. }));
    }

    #[test]
    fn analytic_and_numeric_paths_agree() {
        let mut rates = RateSet::constant(0.4, 1.1, 0.3);
        rates.omega = RateFn::Constant(0.7);
        let osc = RateFn::ExpSinusoid { decay: 0.0, offset: 1.0, sin_coeff: 0.0, cos_coeff: 2.0, frequency: 2.0 };
        let specs = [
            GeneratorSpec::PhaseCovariant(rates),
            GeneratorSpec::PhaseCovariant(RateSet::commutative(0.5, osc, RateFn::Constant(0.1))),
            GeneratorSpec::Pauli(RateSet::constant(1.0, 2.0, 3.0)),
            GeneratorSpec::EternalNonMarkovian,
            GeneratorSpec::TimeDependentModel,
            GeneratorSpec::jaynes_cummings(0.3, 1.0).unwrap(),
        ];
        let tau = 6.0;
        let steps = default_steps(tau);
        for spec in &specs {
            for (a, th) in [(1.0, 0.0), (0.3, 0.9), (0.5, 2.0), (0.0, 0.0)] {
                let rho = PureState::new(a, th).unwrap().density();
                let an = propagate(spec, &rho, tau, steps).unwrap();
                let nu = propagate_numeric(spec, &rho, tau, steps).unwrap();
                assert_eq!(an.method, Method::Analytic);
                assert_eq!(nu.method, Method::Numeric);
                let d = max_trace_distance(&an, &nu);
                assert!(d < 1e-7, "{} a={a}: {d:e}", spec.family_name());
            }
        }
    }

    #[test]
    fn affine_map_examples() {
        let spec = GeneratorSpec::jaynes_cummings(5.0, 1.0).unwrap();
        let map = extract_affine_map(&spec, 4.0, 8192).unwrap();
        assert_eq!(map.a[0], IDENTITY3);
        assert_eq!(map.s[0], [0.0; 3]);
        let g = map.g();
        let h = map.h();
        for k in (0..map.len()).step_by(97) {
            let b = jc::jc_b(map.times[k], 5.0, 1.0).unwrap();
            assert!((g.values[k] - b * b).abs() < 1e-14);
            assert!((h.values[k] - (b * b - 1.0)).abs() < 1e-14);
            assert!((map.a[k][0][0] - b).abs() < 1e-14 && (map.a[k][1][1] - b).abs() < 1e-14);
        }
        let pc = GeneratorSpec::PhaseCovariant(RateSet::commutative(0.5, RateFn::Constant(1.0), RateFn::zero()));
        let map = extract_affine_map_numeric(&pc, 3.0, 6144).unwrap();
        for k in (0..map.len()).step_by(101) {
            let t = map.times[k];
            let (g, h) = crate::generator::commutative_pc_gh(t, 0.5, &RateFn::Constant(1.0)).unwrap();
            assert!((map.g().values[k] - (-0.75 * t).exp()).abs() < 1e-10);
            assert!((map.g().values[k] - g).abs() < 1e-10);
            assert!((map.h().values[k] - h).abs() < 1e-10);
            assert!((h - (1.0 - (-0.75 * t).exp()) / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_lindblad_is_integrated_numerically() {
        // jump |+x⟩⟨−x| pumps every state towards +x
        let plus = [num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2];
        let minus = [plus[0], -plus[1]];
        let spec = GeneratorSpec::GenericLindblad(GenericLindblad {
            hamiltonian: vec![],
            jumps: vec![LindbladTerm { rate: RateFn::Constant(1.0), operator: Mat2::outer(plus, minus) }],
        });
        let tr = propagate(&spec, &DensityMatrix::excited(), 3.0, 6144).unwrap();
        assert_eq!(tr.method, Method::Numeric);
        // ẋ = 1 − x, ż = −z/2 from the dissipator
        for (t, r) in tr.times.iter().zip(&tr.bloch) {
            assert!((r.x - (1.0 - (-t).exp())).abs() < 1e-9);
            assert!((r.z - (-0.5 * t).exp()).abs() < 1e-9);
        }
    }
}
