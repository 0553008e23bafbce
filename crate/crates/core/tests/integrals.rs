mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use taubnut_core::integrals::*;
use taubnut_core::quadrature::Sequential;
use taubnut_core::InstantonConfig;

fn opts() -> IntegralOptions {
    IntegralOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn chern_numbers_are_integers(c in common::config(1..=4)) {
        let r = small_sphere_radius(&c);
        for a in c.centers() {
            let ch = chern(&c, *a, r).unwrap();
            prop_assert!((ch + 1.0).abs() <= 1e-8, "{ch}");
        }
        let large = chern(&c, c.centroid(), 8.0 * c.length_scale()).unwrap();
        prop_assert!((large + c.k() as f64).abs() <= 1e-8, "{large}");
        let add = flux_additivity(&c, 8.0 * c.length_scale(), r, &opts(), &Sequential).unwrap();
        prop_assert!(add.residual <= 1e-9, "{add:?}");
    }

    #[test]
    fn sphere_around_nothing_has_no_flux(c in common::config(1..=3), dir in common::vec3(1.0)) {
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(n > 0.1);
        let far = 20.0 * c.length_scale();
        let center = [dir[0] / n * far, dir[1] / n * far, dir[2] / n * far];
        let f = flux(&c, center, 2.0).unwrap();
        prop_assert!(f.abs() <= 1e-10, "{f}");
    }

    #[test]
    fn flux_is_gauge_invariant(c in common::config(1..=3), seed: u64) {
        let r = small_sphere_radius(&c);
        let mixed = IntegralOptions { gauge: GaugePolicy::Mixed { seed, min_angle: 0.3 }, ..opts() };
        for a in c.centers() {
            let f0 = flux_with(&c, *a, r, &opts(), &Sequential).unwrap();
            let f1 = flux_with(&c, *a, r, &mixed, &Sequential).unwrap();
            prop_assert!((f0 - f1).abs() <= 1e-9 * f0.abs(), "{f0} {f1}");
        }
    }

    #[test]
    fn fiber_length_increases_along_rays(c in common::config(1..=3), dir in common::vec3(1.0)) {
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(n > 0.1);
        let base = 4.0 * c.length_scale();
        let mut last = 0.0;
        for j in 0..8 {
            let r = base * 2f64.powi(j);
            let l = fiber_length(&c, [dir[0] / n * r, dir[1] / n * r, dir[2] / n * r]).unwrap();
            prop_assert!(l > last && l <= c.fiber_period());
            last = l;
        }
    }
}

#[test]
fn far_fiber_reaches_asymptotic_length() {
    let c = InstantonConfig::new(0.5, vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).unwrap();
    let l = fiber_length(&c, [0.0, 0.0, 1e4 * c.diameter()]).unwrap() / c.fiber_period();
    assert!((1.0 - 1e-3..=1.0).contains(&l), "{l}");
}

#[test]
fn mass_equals_sum_of_parameters() {
    let cases = [
        (0.5, vec![[0.0; 3]]),
        (0.25, vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
        (
            0.25,
            vec![[1.0, 0.0, 0.0], [-0.5, 0.8, 0.3], [0.0, -1.0, 0.5]],
        ),
    ];
    for (m, centers) in cases {
        let c = InstantonConfig::new(m, centers).unwrap();
        let report = mass(&c, &default_mass_radii(&c), &opts(), &Sequential).unwrap();
        let expected = c.k() as f64 * m;
        assert!(
            (report.extrapolated / expected - 1.0).abs() <= 0.01,
            "{report:?}"
        );
        assert!(report.extrapolated >= 0.0);
        assert_eq!(report.fiber_defect, 0.0);
        // errors shrink like R^-1 on a doubling schedule
        for r in report.difference_ratios.iter().flatten() {
            assert!((r - 2.0).abs() < 0.1, "{r}");
        }
        // -8 pi mass = L c_1 at infinity
        let c_inf = chern(&c, c.centroid(), 8.0 * c.length_scale()).unwrap();
        let lhs = -8.0 * PI * report.extrapolated;
        let rhs = c.fiber_period() * c_inf;
        assert!((lhs / rhs - 1.0).abs() <= 0.01);
    }
}

#[test]
fn flat_model_has_zero_mass_and_exact_volume() {
    let c = InstantonConfig::flat(0.5).unwrap();
    let report = mass(&c, &default_mass_radii(&c), &opts(), &Sequential).unwrap();
    assert!(report.estimates.iter().all(|m| *m == 0.0));
    let r = 3.0;
    let v = tube_volume(&c, r, &VolumeOptions::default()).unwrap();
    assert!((v / (4.0 * PI / 3.0 * r.powi(3) * c.fiber_period()) - 1.0).abs() <= 1e-15);
}

#[test]
fn single_center_volume_subleading_term() {
    let m = 0.5;
    let c = InstantonConfig::taub_nut(m).unwrap();
    for r in [2.0, 10.0, 50.0] {
        let v = tube_volume(&c, r, &VolumeOptions::default()).unwrap();
        let excess = v - 4.0 * PI / 3.0 * r.powi(3) * c.fiber_period();
        let expected = c.fiber_period() * 2.0 * m * 2.0 * PI * r * r;
        assert!(
            (excess / expected - 1.0).abs() <= 1e-10,
            "{excess} {expected}"
        );
    }
}

#[test]
fn volume_growth_is_cubic() {
    let c = InstantonConfig::new(0.25, vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).unwrap();
    let r = 64.0 * c.length_scale();
    let v1 = tube_volume(&c, r, &VolumeOptions::default()).unwrap();
    let v2 = tube_volume(&c, 2.0 * r, &VolumeOptions::default()).unwrap();
    let model = 4.0 * PI / 3.0 * c.fiber_period();
    assert!((v1 / r.powi(3) / model - 1.0).abs() <= 0.02);
    assert!((v2 / v1 / 8.0 - 1.0).abs() <= 0.02);
}

#[test]
fn negative_controls_break_quantization() {
    let c = InstantonConfig::taub_nut(0.5)
        .unwrap()
        .with_perturbed_connection(0, 1.25)
        .unwrap();
    let ch = chern(&c, [0.0; 3], 0.5).unwrap();
    assert!((ch - ch.round()).abs() > 0.1, "{ch}");

    let c = InstantonConfig::unequal_masses_debug(
        0.5,
        vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
        vec![0.5, 0.8],
    )
    .unwrap();
    let ch = chern(&c, [-1.0, 0.0, 0.0], 0.5).unwrap();
    assert!((ch - ch.round()).abs() > 0.1, "{ch}");
}
