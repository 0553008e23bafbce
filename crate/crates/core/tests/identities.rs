mod common;

use proptest::prelude::*;
use taubnut_core::connection::{transition_consistency, verify_curvature};
use taubnut_core::geometry::{frame, laplace_beltrami};
use taubnut_core::hyperkahler::{
    closedness_residual, killing_data, killing_moment_check, quaternion_check,
};
use taubnut_core::potential::{eval_v, harmonic_residual_v, hessian_scale};
use taubnut_core::{ChartPoint, GaugeChart};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_is_harmonic(c in common::config(1..=5), x in common::vec3(4.0)) {
        prop_assume!(common::far_from_centers(&c, x));
        let v = eval_v(&c, x).unwrap();
        let r = harmonic_residual_v(&c, x).unwrap().abs() / hessian_scale(&v);
        prop_assert!(r <= 1e-12, "{r}");
    }

    #[test]
    fn curvature_of_connection_is_star_dv(c in common::config(1..=5), x in common::vec3(4.0), seed: u64) {
        prop_assume!(common::well_placed(&c, x));
        let gauge = GaugeChart::mixed(&c, x, seed, 0, 0.3);
        prop_assert!(verify_curvature(&c, &gauge, x).unwrap() <= 1e-9);
    }

    #[test]
    fn chart_transitions_wind_once(c in common::config(1..=3), x in common::vec3(4.0)) {
        prop_assume!(common::well_placed(&c, x));
        for i in 0..c.k() {
            let t = transition_consistency(&c, i, x).unwrap();
            prop_assert!(t.consistent(1e-9), "{t:?}");
            prop_assert!((t.winding - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn ricci_flat_with_riemann_symmetries(c in common::config(0..=4), x in common::vec3(4.0)) {
        prop_assume!(common::far_from_centers(&c, x));
        let f = frame(&c, &ChartPoint::automatic(&c, x)).unwrap();
        prop_assert!(f.ricci_max_abs() <= 1e-8 * (1.0 + f.riem_norm()));
        prop_assert!(f.riemann_symmetry_residual() <= 1e-10);
        prop_assert!(f.scalar_curvature().abs() <= 1e-8 * (1.0 + f.riem_norm()));
    }

    #[test]
    fn curvature_norm_is_gauge_invariant(c in common::config(1..=4), x in common::vec3(4.0), seed: u64) {
        prop_assume!(common::well_placed(&c, x));
        let auto = frame(&c, &ChartPoint::automatic(&c, x)).unwrap();
        let mixed = frame(&c, &ChartPoint::new(x, 1.3, GaugeChart::mixed(&c, x, seed, 1, 0.3))).unwrap();
        let (a, b) = (auto.riem_norm(), mixed.riem_norm());
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-300), "{a} {b}");
    }

    #[test]
    fn hyperkahler_structure(c in common::config(0..=4), x in common::vec3(4.0)) {
        prop_assume!(common::far_from_centers(&c, x));
        let p = ChartPoint::automatic(&c, x);
        let closed = closedness_residual(&c, &p).unwrap();
        prop_assert!(closed.iter().all(|r| *r <= 1e-9), "{closed:?}");
        let q = quaternion_check(&c, &p).unwrap();
        prop_assert!(q.max_residual() <= 1e-10, "{q:?}");
        let k = killing_moment_check(&c, &p).unwrap();
        prop_assert!(k.moment.iter().all(|r| *r <= 1e-12));
        prop_assert!(k.v_from_w <= 1e-12);
        prop_assert_eq!(k.lie_derivative, 0.0);
        let v = eval_v(&c, x).unwrap().value;
        prop_assert!((killing_data(&c, &p).unwrap().v_from_w / v - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn coordinates_are_harmonic(c in common::config(0..=4), x in common::vec3(4.0)) {
        prop_assume!(common::far_from_centers(&c, x));
        let p = ChartPoint::automatic(&c, x);
        for k in 0..3 {
            let r = laplace_beltrami(&c, &p, |y| y[k]).unwrap();
            prop_assert!(r.abs() <= 1e-9, "{k}: {r}");
        }
    }
}

#[test]
fn perturbed_connection_violates_identities() {
    let c = taubnut_core::InstantonConfig::taub_nut(0.5)
        .unwrap()
        .with_perturbed_connection(0, 1.25)
        .unwrap();
    let x = [0.7, -0.3, 0.4];
    let gauge = GaugeChart::automatic(&c, x);
    assert!(verify_curvature(&c, &gauge, x).unwrap() >= 1e-3);
    let f = frame(&c, &ChartPoint::automatic(&c, x)).unwrap();
    assert!(f.ricci_max_abs() >= 1e-3 * (1.0 + f.riem_norm()));
}
