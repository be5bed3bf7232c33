//! Classification of dynamical maps by the behaviour of the deformation `g(t)`
//! and translation `h(t)` seen by an antipodal pair `±n`, and the closed-form
//! speed-limit ratios available for each class.
//!
//! * **A**: the pair `±n` develops coherence (a component transverse to `n`).
//! * **B**: no coherence is created; `n·r(t) = ±g(t) + h(t)`.
//! * **Ci**: `g` and `h` never move in opposite directions; **Ciii** in
//!   addition neither ever increases.
//! * **Cii**: `g` and `h` never move in the same direction; **Civ** in
//!   addition `g` never increases and `h` never decreases.
//! * **D**: `h ≡ 0` (unital along `n`).
//!
//! With `𝒩 = ∫_{d|g|/dt>0} d|g|/dt` (the BLP value of `±n`) and
//! `∫|g′| = 2𝒩 + 1 − |g(τ)|`, the ratio `(1 − G)/∫|G′|` of the branch
//! `G = g ± h` that is additive in `|g′|` and `|h′|` becomes a closed form.

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::propagation::{extract_affine_map, AffineBlochMap};
use crate::qsl::Branch;
use crate::quadrature::ScalarSamples;
use crate::qubit::BlochVector;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapClass {
    A,
    B,
    Ci,
    Cii,
    Ciii,
    Civ,
    D,
}

impl MapClass {
    pub fn name(self) -> &'static str {
        match self {
            MapClass::A => "A",
            MapClass::B => "B",
            MapClass::Ci => "Ci",
            MapClass::Cii => "Cii",
            MapClass::Ciii => "Ciii",
            MapClass::Civ => "Civ",
            MapClass::D => "D",
        }
    }

    /// Classes that do not create coherence between `±n`.
    pub fn is_coherence_non_increasing(self) -> bool {
        self != MapClass::A
    }
}

/// Closed form of the ratio for a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    /// `(1 − g − h) / (2𝒩 + 1 − |g| + ∫|h′|)`.
    CoupledUpper,
    /// `(1 − g + h) / (2𝒩 + 1 − |g| + ∫|h′|)`.
    AntiCoupledLower,
    /// `(1 − g − h) / (2𝒩 + 1 − |g| − h)`, split on the sign of `g(τ)`.
    MonotoneUpper,
    /// `(1 − g + h) / (2𝒩 + 1 − |g| + h)`, split on the sign of `g(τ)`.
    MonotoneLower,
    /// `(1 − g) / (2𝒩 + 1 − |g|)`.
    Unital,
}

impl FormulaId {
    pub fn name(self) -> &'static str {
        match self {
            FormulaId::CoupledUpper => "coupled-upper",
            FormulaId::AntiCoupledLower => "anti-coupled-lower",
            FormulaId::MonotoneUpper => "monotone-upper",
            FormulaId::MonotoneLower => "monotone-lower",
            FormulaId::Unital => "unital",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaxonomyLabel {
    pub class: MapClass,
    /// Initial state `±n` to which the class formula applies.
    pub branch: Branch,
    pub g_tau: f64,
    pub h_tau: f64,
    pub formula: Option<FormulaId>,
    /// First sampled time at which coherence appears (class A only).
    pub violation_time: Option<f64>,
    pub axis: BlochVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: TaxonomyLabel,
    pub g: ScalarSamples,
    pub h: ScalarSamples,
}

/// Classification relative to the `±z` pair.
pub fn classify_map(spec: &GeneratorSpec, tau: f64, steps: usize) -> Result<Classification> {
    classify_map_in_basis(spec, tau, steps, BlochVector::new(0.0, 0.0, 1.0))
}

/// Classification relative to the pair `±axis`.
pub fn classify_map_in_basis(spec: &GeneratorSpec, tau: f64, steps: usize, axis: BlochVector) -> Result<Classification> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("classification needs tau > 0, got {tau}")));
    }
    if (axis.norm() - 1.0).abs() > tolerance::BLOCH_NORM {
        return Err(Error::InvalidArgument("classification axis must be a unit vector".into()));
    }
    let map = extract_affine_map(spec, tau, steps)?;
    Ok(classify_affine_map(&map, axis))
}

fn transverse(v: BlochVector, n: BlochVector) -> f64 {
    (v - n.scale(v.dot(&n))).norm()
}

/// Classification of a precomputed map relative to `±axis`.
pub fn classify_affine_map(map: &AffineBlochMap, axis: BlochVector) -> Classification {
    let g = map.axis_g(axis);
    let h = map.axis_h(axis);
    let zero = BlochVector::zero();
    let violation = (0..map.len()).find(|&k| {
        let s = map.apply(k, zero);
        let an = map.apply(k, axis) - s;
        let ds = map.velocity(k, zero);
        let dan = map.velocity(k, axis) - ds;
        [an, s, dan, ds].iter().any(|v| transverse(*v, axis) > tolerance::SIGN_DEAD_BAND)
    });
    let (class, branch) = match violation {
        Some(_) => (MapClass::A, Branch::Upper),
        None => refine_b(&g, &h),
    };
    let formula = match class {
        MapClass::A | MapClass::B => None,
        MapClass::Ci => Some(FormulaId::CoupledUpper),
        MapClass::Cii => Some(FormulaId::AntiCoupledLower),
        MapClass::Ciii => Some(FormulaId::MonotoneUpper),
        MapClass::Civ => Some(FormulaId::MonotoneLower),
        MapClass::D => Some(FormulaId::Unital),
    };
    let label = TaxonomyLabel {
        class,
        branch,
        g_tau: g.last_value(),
        h_tau: h.last_value(),
        formula,
        violation_time: violation.map(|k| map.times[k]),
        axis,
    };
    Classification { label, g, h }
}

/// Sub-classes of B from the signs of the exact derivatives, with a dead band
/// so that extrema count as both signs.
fn refine_b(g: &ScalarSamples, h: &ScalarSamples) -> (MapClass, Branch) {
    let db = tolerance::SIGN_DEAD_BAND;
    if h.values.iter().all(|v| v.abs() <= db) {
        return (MapClass::D, Branch::Upper);
    }
    let pairs = || g.derivs.iter().zip(&h.derivs);
    let coupled = !pairs().any(|(&dg, &dh)| (dg > db && dh < -db) || (dg < -db && dh > db));
    let anti = !pairs().any(|(&dg, &dh)| (dg > db && dh > db) || (dg < -db && dh < -db));
    if coupled {
        let monotone = pairs().all(|(&dg, &dh)| dg <= db && dh <= db);
        (if monotone { MapClass::Ciii } else { MapClass::Ci }, Branch::Upper)
    } else if anti {
        let monotone = pairs().all(|(&dg, &dh)| dg <= db && dh >= -db);
        (if monotone { MapClass::Civ } else { MapClass::Cii }, Branch::Lower)
    } else {
        (MapClass::B, Branch::Upper)
    }
}

/// Class formula for the ratio of the initial state `branch · axis`, given the
/// BLP value `blp` of the pair `±axis` and samples of `g`, `h` on `[0, τ]`.
pub fn taxonomy_ratio(label: &TaxonomyLabel, g: &ScalarSamples, h: &ScalarSamples, blp: f64) -> Result<f64> {
    let formula = label
        .formula
        .ok_or_else(|| Error::NoClosedForm(format!("class {} has no closed-form ratio", label.class.name())))?;
    let (gt, ht) = (g.last_value(), h.last_value());
    let (num, den) = match formula {
        FormulaId::CoupledUpper => (1.0 - gt - ht, 2.0 * blp + 1.0 - gt.abs() + h.total_variation()),
        FormulaId::AntiCoupledLower => (1.0 - gt + ht, 2.0 * blp + 1.0 - gt.abs() + h.total_variation()),
        FormulaId::MonotoneUpper => {
            let den = if gt >= 0.0 { 1.0 - gt - ht } else { 1.0 + gt - ht };
            (1.0 - gt - ht, 2.0 * blp + den)
        }
        FormulaId::MonotoneLower => {
            let den = if gt >= 0.0 { 1.0 - gt + ht } else { 1.0 + gt + ht };
            (1.0 - gt + ht, 2.0 * blp + den)
        }
        FormulaId::Unital => (1.0 - gt, 2.0 * blp + 1.0 - gt.abs()),
    };
    if den <= tolerance::CROSS_CHECK {
        return Ok(1.0);
    }
    Ok((num / den).max(0.0))
}
