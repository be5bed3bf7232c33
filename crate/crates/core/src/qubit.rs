//! Exact 2×2 complex linear algebra and single-qubit state representations.
//!
//! Basis convention: index 0 is the excited state `|1⟩`, index 1 is the ground
//! state `|0⟩`. With `σ₃ = diag(1, -1)` in this ordering, Bloch `z = +1` is the
//! excited state and
//!
//! ```text
//! ρ = ½ [[1 + z, x − i y],
//!        [x + i y, 1 − z]]
//! ```
//!
//! `σ₊ = (σ₁ + iσ₂)/2` maps `|0⟩ → |1⟩` (raising), `σ₋` is its adjoint.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix stored row-major.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl Mat2 {
    pub const fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn sigma_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub const fn sigma_y() -> Self {
        Mat2([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub const fn sigma_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]])
    }

    /// `σ₊ = |1⟩⟨0|`.
    pub const fn sigma_plus() -> Self {
        Mat2([[ZERO, ONE], [ZERO, ZERO]])
    }

    /// `σ₋ = |0⟩⟨1|`.
    pub const fn sigma_minus() -> Self {
        Mat2([[ZERO, ZERO], [ONE, ZERO]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: [Complex64; 2], v: [Complex64; 2]) -> Self {
        Mat2([
            [u[0] * v[0].conj(), u[0] * v[1].conj()],
            [u[1] * v[0].conj(), u[1] * v[1].conj()],
        ])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let m = &self.0;
        Mat2([[f(m[0][0]), f(m[0][1])], [f(m[1][0]), f(m[1][1])]])
    }

    pub fn commutator(&self, other: &Mat2) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Mat2) -> Self {
        *self * *other + *other * *self
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨u| M |v⟩`.
    pub fn sandwich(&self, u: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
        let mv = [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ];
        u[0].conj() * mv[0] + u[1].conj() * mv[1]
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.0;
        (m[1][0] - m[0][1].conj())
            .norm()
            .max(m[0][0].im.abs())
            .max(m[1][1].im.abs())
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Singular values `(s_max, s_min)`. With `M = c₀I + c·σ` (complex
    /// coefficients), `M†M = (|c₀|² + |c|²) I + w·σ` where
    /// `w = 2 Re(c̄₀ c) + i c̄ × c`, so `s² = |c₀|² + |c|² ± |w|`.
    pub fn singular_values(&self) -> (f64, f64) {
        let m = &self.0;
        let c0 = (m[0][0] + m[1][1]) * 0.5;
        let c = [(m[0][1] + m[1][0]) * 0.5, (m[0][1] - m[1][0]) * I * 0.5, (m[0][0] - m[1][1]) * 0.5];
        let cb = [c[0].conj(), c[1].conj(), c[2].conj()];
        let cross = [
            cb[1] * c[2] - cb[2] * c[1],
            cb[2] * c[0] - cb[0] * c[2],
            cb[0] * c[1] - cb[1] * c[0],
        ];
        let w: Vec<f64> = (0..3).map(|k| 2.0 * (c0.conj() * c[k]).re - cross[k].im).collect();
        let w = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        let base = c0.norm_sqr() + c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let s_max = (base + w).max(0.0).sqrt();
        // s_max · s_min = |det| is better conditioned than the difference formula.
        let s_min = if s_max > 0.0 { self.det().norm() / s_max } else { 0.0 };
        (s_max, s_min.min(s_max))
    }

    /// Bloch components `tr(σᵢ M)` of a Hermitian matrix, ignoring any imaginary residue.
    pub fn pauli_components(&self) -> [f64; 3] {
        let m = &self.0;
        [
            (m[0][1] + m[1][0]).re,
            (I * (m[0][1] - m[1][0])).re,
            (m[0][0] - m[1][1]).re,
        ]
    }

    /// `(c₀ I + v·σ)` assembled from real coefficients.
    pub fn from_pauli(c0: f64, v: [f64; 3]) -> Self {
        Mat2([
            [Complex64::new(c0 + v[2], 0.0), Complex64::new(v[0], -v[1])],
            [Complex64::new(v[0], v[1]), Complex64::new(c0 - v[2], 0.0)],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, rhs: Mat2) {
        *self = *self + rhs;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.map(|z| -z)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

/// A Bloch vector `r ∈ ℝ³`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub const fn zero() -> Self {
        BlochVector::new(0.0, 0.0, 0.0)
    }

    pub const fn from_array(v: [f64; 3]) -> Self {
        BlochVector::new(v[0], v[1], v[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector along `self`; zero stays zero.
    pub fn normalized(&self) -> BlochVector {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n)
        } else {
            *self
        }
    }

    /// Polar angle / azimuth parametrisation of the unit sphere.
    pub fn from_angles(polar: f64, azimuth: f64) -> BlochVector {
        BlochVector::new(polar.sin() * azimuth.cos(), polar.sin() * azimuth.sin(), polar.cos())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        self.scale(-1.0)
    }
}

/// A validated qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within [`tolerance::CONSTRUCTION`].
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonPhysicalState("non-finite entries".into()));
        }
        let herm = m.hermiticity_defect();
        if herm > tolerance::CONSTRUCTION {
            return Err(Error::NonPhysicalState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > tolerance::CONSTRUCTION {
            return Err(Error::NonPhysicalState(format!("trace {tr} != 1")));
        }
        let (lo, _) = hermitian_eigenvalues(&m);
        if lo < -tolerance::CONSTRUCTION {
            return Err(Error::NonPhysicalState(format!("negative eigenvalue {lo:.3e}")));
        }
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat2::identity().scale(0.5))
    }

    /// `|1⟩⟨1|`.
    pub fn excited() -> Self {
        DensityMatrix(Mat2::from_real([[1.0, 0.0], [0.0, 0.0]]))
    }

    /// `|0⟩⟨0|`.
    pub fn ground() -> Self {
        DensityMatrix(Mat2::from_real([[0.0, 0.0], [0.0, 1.0]]))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn bloch(&self) -> BlochVector {
        density_to_bloch(self)
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        hermitian_eigenvalues(&self.0)
    }

    /// Builds the matrix `(I + r·σ)/2` without validation.
    pub(crate) fn from_bloch_unchecked(r: BlochVector) -> Self {
        DensityMatrix(Mat2::from_pauli(1.0, r.to_array()).scale(0.5))
    }
}

/// Eigenvalues `(λ_min, λ_max)` of the Hermitian part of `m`.
fn hermitian_eigenvalues(m: &Mat2) -> (f64, f64) {
    let a = m.0[0][0].re;
    let d = m.0[1][1].re;
    let b = m.0[0][1];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - half_gap, mean + half_gap)
}

/// `ρ = (I + r·σ)/2`.
///
/// Vectors with `1 < |r| ≤ 1 + 1e-9` are rescaled onto the sphere so the
/// result is always a valid state.
pub fn bloch_to_density(r: BlochVector) -> Result<DensityMatrix> {
    let n = r.norm();
    if !n.is_finite() || n > 1.0 + tolerance::BLOCH_NORM {
        return Err(Error::NonPhysicalState(format!("Bloch vector norm {n} exceeds 1")));
    }
    let r = if n > 1.0 { r.scale(1.0 / n) } else { r };
    Ok(DensityMatrix::from_bloch_unchecked(r))
}

pub fn density_to_bloch(rho: &DensityMatrix) -> BlochVector {
    BlochVector::from_array(rho.0.pauli_components())
}

/// `D(ρ₁, ρ₂) = ½ tr|ρ₁ − ρ₂|`, from the singular values of the difference.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    0.5 * norm_triple(&(rho1.0 - rho2.0)).tr
}

/// Pure state `|ψ⟩ = √a |1⟩ + e^{iθ} √(1−a) |0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    a: f64,
    theta: f64,
}

impl PureState {
    pub fn new(a: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "pure state needs a in [0,1] and finite theta, got a={a}, theta={theta}"
            )));
        }
        Ok(PureState { a, theta: theta.rem_euclid(2.0 * PI) })
    }

    /// Excited-state population `a`.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn excited() -> Self {
        PureState { a: 1.0, theta: 0.0 }
    }

    pub fn ground() -> Self {
        PureState { a: 0.0, theta: 0.0 }
    }

    /// Pure state whose Bloch vector points along `n` (normalised).
    pub fn from_bloch(n: BlochVector) -> Result<Self> {
        let n = n.normalized();
        if n.norm() == 0.0 {
            return Err(Error::InvalidArgument("zero Bloch direction".into()));
        }
        let a = (0.5 * (1.0 + n.z)).clamp(0.0, 1.0);
        let theta = if n.x == 0.0 && n.y == 0.0 { 0.0 } else { n.y.atan2(n.x) };
        PureState::new(a, theta)
    }

    pub fn ket(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.a.sqrt(), 0.0),
            Complex64::from_polar((1.0 - self.a).sqrt(), self.theta),
        ]
    }

    /// `|ψ⊥⟩ = √(1−a) |1⟩ − e^{iθ} √a |0⟩`.
    pub fn perp_ket(&self) -> [Complex64; 2] {
        [
            Complex64::new((1.0 - self.a).sqrt(), 0.0),
            -Complex64::from_polar(self.a.sqrt(), self.theta),
        ]
    }

    pub fn density(&self) -> DensityMatrix {
        let k = self.ket();
        DensityMatrix(Mat2::outer(k, k))
    }

    pub fn bloch(&self) -> BlochVector {
        let s = 2.0 * (self.a * (1.0 - self.a)).sqrt();
        BlochVector::new(s * self.theta.cos(), s * self.theta.sin(), 2.0 * self.a - 1.0)
    }
}

/// Fidelity `F = ⟨ψ|ρ|ψ⟩` and Bures angle `L = arccos √F`.
pub fn fidelity_and_bures(psi: &PureState, rho: &DensityMatrix) -> (f64, f64) {
    let k = psi.ket();
    let f = rho.0.sandwich(k, k).re.clamp(0.0, 1.0);
    (f, f.sqrt().acos())
}

/// Operator, trace and Hilbert-Schmidt norms of a 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormTriple {
    pub op: f64,
    pub tr: f64,
    pub hs: f64,
}

impl NormTriple {
    pub fn scale(&self, s: f64) -> NormTriple {
        NormTriple { op: self.op * s, tr: self.tr * s, hs: self.hs * s }
    }
}

pub fn norm_triple(m: &Mat2) -> NormTriple {
    let (s1, s2) = m.singular_values();
    NormTriple { op: s1, tr: s1 + s2, hs: (s1 * s1 + s2 * s2).sqrt() }
}
