//! Randomised invariants across modules.

use std::f64::consts::PI;

use proptest::prelude::*;

use crate::nonmarkov::blp_pair;
use crate::optimality::optimality_conditions;
use crate::propagation::{default_steps, extract_affine_map, propagate, propagate_numeric};
use crate::qsl::{qsl_from_map, qsl_time};
use crate::quadrature::ScalarSamples;
use crate::qubit::{bloch_to_density, fidelity_and_bures, norm_triple, trace_distance};
use crate::taxonomy::{classify_affine_map, MapClass};
use crate::{BlochVector, GeneratorSpec, PureState, RateSet};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

fn bloch_ball() -> impl Strategy<Value = BlochVector> {
    (-1.0f64..=1.0, 0.0..2.0 * PI, 0.0f64..=1.0)
        .prop_map(|(c, phi, r)| BlochVector::from_angles(c.acos(), phi).scale(r.cbrt()))
}

fn pure_state() -> impl Strategy<Value = PureState> {
    (0.0f64..=1.0, 0.0..2.0 * PI).prop_map(|(a, t)| PureState::new(a, t).unwrap())
}

fn nonneg_rates() -> impl Strategy<Value = RateSet> {
    (0.0f64..3.0, 0.0f64..3.0, 0.0f64..3.0).prop_map(|(a, b, c)| RateSet::constant(a, b, c))
}

fn constant_spec() -> impl Strategy<Value = GeneratorSpec> {
    (nonneg_rates(), any::<bool>())
        .prop_map(|(r, pc)| if pc { GeneratorSpec::PhaseCovariant(r) } else { GeneratorSpec::Pauli(r) })
}

fn shipped_spec() -> impl Strategy<Value = GeneratorSpec> {
    prop_oneof![
        constant_spec(),
        (0.05f64..6.0).prop_map(|g| GeneratorSpec::jaynes_cummings(g, 1.0).unwrap()),
        Just(GeneratorSpec::EternalNonMarkovian),
        Just(GeneratorSpec::TimeDependentModel),
    ]
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn bloch_density_round_trip(r in bloch_ball()) {
        let back = bloch_to_density(r).unwrap().bloch();
        prop_assert!((back - r).norm() < 1e-12);
    }

    #[test]
    fn trace_distance_is_half_bloch_distance(r1 in bloch_ball(), r2 in bloch_ball()) {
        let d = trace_distance(&bloch_to_density(r1).unwrap(), &bloch_to_density(r2).unwrap());
        prop_assert!((d - 0.5 * (r1 - r2).norm()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_bounded(psi in pure_state(), r in bloch_ball()) {
        let rho = bloch_to_density(r).unwrap();
        let (f, l) = fidelity_and_bures(&psi, &rho);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((0.0..=PI / 2.0 + 1e-15).contains(&l));
        let (f_self, l_self) = fidelity_and_bures(&psi, &psi.density());
        prop_assert!((f_self - 1.0).abs() < 1e-12 && l_self < 1e-6);
    }

    #[test]
    fn generator_norms_are_degenerate(spec in shipped_spec(), r in bloch_ball(), t in 0.0f64..1.0) {
        let n = norm_triple(&spec.evaluate(&bloch_to_density(r).unwrap(), t).unwrap());
        prop_assert!((n.tr - 2.0 * n.op).abs() < 1e-10);
        prop_assert!((n.hs - 2f64.sqrt() * n.op).abs() < 1e-10);
    }

    #[test]
    fn generators_preserve_trace_and_hermiticity(spec in shipped_spec(), r in bloch_ball(), t in 0.0f64..1.0) {
        let l = spec.evaluate(&bloch_to_density(r).unwrap(), t).unwrap();
        prop_assert!(l.trace().norm() < 1e-12);
        prop_assert!(l.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn ratio_never_exceeds_one(spec in shipped_spec(), psi in pure_state(), tau in 0.05f64..3.0) {
        let r = qsl_time(&spec, &psi, tau, default_steps(tau)).unwrap();
        prop_assert!(r.ratio <= 1.0 + 1e-9, "ratio {}", r.ratio);
        prop_assert!(r.ratio >= 0.0);
        prop_assert!(r.tau_qsl >= r.tau_qsl_tr() - 1e-12 && r.tau_qsl >= r.tau_qsl_hs() - 1e-12);
    }

    #[test]
    fn semigroups_have_no_backflow(spec in constant_spec(), r1 in bloch_ball(), r2 in bloch_ball(), tau in 0.1f64..3.0) {
        prop_assume!((r1 - r2).norm() > 1e-6);
        prop_assert!(blp_pair(&spec, r1, r2, tau, 512).unwrap() < 1e-9);
    }

    #[test]
    fn phase_covariant_ratio_ignores_phase(rates in nonneg_rates(), a in 0.0f64..=1.0, t1 in 0.0..2.0 * PI, t2 in 0.0..2.0 * PI) {
        let spec = GeneratorSpec::PhaseCovariant(rates);
        let map = extract_affine_map(&spec, 1.0, 512).unwrap();
        let r1 = qsl_from_map(&spec, &map, &PureState::new(a, t1).unwrap()).ratio;
        let r2 = qsl_from_map(&spec, &map, &PureState::new(a, t2).unwrap()).ratio;
        prop_assert!((r1 - r2).abs() < 1e-10);
    }

    #[test]
    fn analytic_and_numeric_trajectories_agree(spec in constant_spec(), r in bloch_ball(), tau in 0.1f64..2.0) {
        let rho = bloch_to_density(r).unwrap();
        let a = propagate(&spec, &rho, tau, default_steps(tau)).unwrap();
        let b = propagate_numeric(&spec, &rho, tau, default_steps(tau)).unwrap();
        for (x, y) in a.bloch.iter().zip(&b.bloch) {
            prop_assert!((*x - *y).norm() < 1e-7);
        }
    }

    #[test]
    fn optimality_conditions_match_speed_identity(spec in shipped_spec(), psi in pure_state(), t in 0.0f64..1.0) {
        let rep = optimality_conditions(&spec, &psi, t, 256).unwrap();
        let gap = -rep.c2 - rep.op_norm;
        prop_assert!(gap <= 1e-12);
        if rep.satisfied {
            prop_assert!(gap.abs() < 1e-9);
        }
    }

    #[test]
    fn classes_are_nested(spec in shipped_spec(), tau in 0.2f64..4.0) {
        let map = extract_affine_map(&spec, tau, 256).unwrap();
        let c = classify_affine_map(&map, BlochVector::new(0.0, 0.0, 1.0));
        if c.label.class == MapClass::D {
            prop_assert!(c.h.values.iter().all(|v| v.abs() <= 1e-10));
        }
        prop_assert_eq!(c.label.class == MapClass::A, c.label.violation_time.is_some());
    }

    #[test]
    fn positive_variation_telescopes(amp in 0.1f64..2.0, w in 0.5f64..6.0, phase in 0.0..2.0 * PI) {
        // f = amp·cos(w t + φ) on [0, 3]: sum of (peak − preceding trough)
        let times: Vec<f64> = (0..=3000).map(|k| k as f64 * 0.001).collect();
        let f = |t: f64| amp * (w * t + phase).cos();
        let s = ScalarSamples::from_fn(&times, f, |t| -amp * w * (w * t + phase).sin());
        let mut marks = vec![0.0];
        let mut k = ((phase / PI).floor() + 1.0) as i64;
        loop {
            let t = (k as f64 * PI - phase) / w;
            if t >= 3.0 { break; }
            if t > 0.0 { marks.push(t); }
            k += 1;
        }
        marks.push(3.0);
        let expected: f64 = marks.windows(2).map(|m| (f(m[1]) - f(m[0])).max(0.0)).sum();
        prop_assert!((s.positive_variation() - expected).abs() < 1e-8);
    }
}
