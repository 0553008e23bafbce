mod common;

use taubnut_core::asymptotics::*;
use taubnut_core::quadrature::Sequential;
use taubnut_core::InstantonConfig;

fn rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

fn apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (0..3).map(|j| r[i][j] * v[j]).sum())
}

fn slope(c: &InstantonConfig, q: Quantity, sampler: &SphereSampler) -> ExponentFit {
    let s = decay_samples(c, q, &default_decay_radii(c), sampler, &Sequential).unwrap();
    fit_exponent(&s).unwrap()
}

fn configs() -> Vec<InstantonConfig> {
    vec![
        InstantonConfig::taub_nut(0.5).unwrap(),
        InstantonConfig::new(0.25, vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).unwrap(),
        InstantonConfig::new(
            0.25,
            vec![[1.0, 0.0, 0.0], [-0.5, 0.8, 0.3], [0.0, -1.0, 0.5]],
        )
        .unwrap(),
    ]
}

#[test]
fn decay_exponents() {
    let sampler = SphereSampler::from_seed(SphereSampler::DEFAULT_COUNT, 0);
    for c in configs() {
        for q in Quantity::ALL {
            let fit = slope(&c, q, &sampler);
            assert!(
                (fit.slope - q.expected_slope()).abs() <= 0.05,
                "{q}: {fit:?}"
            );
        }
    }
}

#[test]
fn riem_norm_decreases_with_radius() {
    let c = &configs()[2];
    let sampler = SphereSampler::from_seed(500, 3);
    let radii: Vec<f64> = (0..6)
        .map(|j| 4.0 * c.diameter() * 1.5f64.powi(j))
        .collect();
    let s = decay_samples(c, Quantity::RiemNorm, &radii, &sampler, &Sequential).unwrap();
    assert!(s.windows(2).all(|w| w[1].value < w[0].value), "{s:?}");
}

#[test]
fn metric_deviation_sup_matches_closed_form() {
    let c = InstantonConfig::taub_nut(0.5).unwrap();
    let sampler = SphereSampler::from_seed(200, 9);
    for r in [4.0, 40.0] {
        let s = sup_on_sphere(
            &c,
            Quantity::MetricDeviation,
            [0.0; 3],
            r,
            &sampler,
            &Sequential,
        )
        .unwrap();
        let v = 1.0 + 1.0 / r;
        assert!((s.value / (v - 1.0) - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn fits_are_equivariant_under_rigid_motions() {
    let c = &configs()[2];
    let rot = rotation([0.3, -1.0, 0.5], 0.7);
    let shift = [3.0, -2.0, 5.0];
    let moved: Vec<[f64; 3]> = c
        .centers()
        .iter()
        .map(|a| {
            let b = apply(&rot, *a);
            [b[0] + shift[0], b[1] + shift[1], b[2] + shift[2]]
        })
        .collect();
    let d = InstantonConfig::with_exclusion_radius(c.mass(), moved, c.exclusion_radius()).unwrap();
    let sampler = SphereSampler::from_seed(400, 5);
    for q in Quantity::ALL {
        let a = slope(c, q, &sampler);
        let b = slope(&d, q, &sampler.rotated(rot));
        assert!((a.slope - b.slope).abs() <= 1e-6, "{q}: {a:?} {b:?}");
    }
}

#[test]
fn nut_curvature_stays_bounded_and_local() {
    let sampler = SphereSampler::from_seed(200, 0);
    for c in configs() {
        for report in nut_boundedness_all(&c, &sampler, &Sequential).unwrap() {
            assert!(report.bounded, "{report:?}");
        }
    }
    let single = InstantonConfig::taub_nut(0.25).unwrap();
    let pair =
        InstantonConfig::with_exclusion_radius(0.25, vec![[0.0; 3], [1000.0, 0.0, 0.0]], 1e-3)
            .unwrap();
    let radii = default_nut_radii(&single);
    let a = nut_boundedness(&single, 0, &radii, &sampler, &Sequential).unwrap();
    let b = nut_boundedness(&pair, 0, &radii, &sampler, &Sequential).unwrap();
    assert!(
        (b.plateau / a.plateau - 1.0).abs() <= 0.01,
        "{} {}",
        a.plateau,
        b.plateau
    );
}
