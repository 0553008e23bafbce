#![allow(dead_code)]

use proptest::prelude::*;
use taubnut_core::InstantonConfig;

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub fn vec3(range: f64) -> impl Strategy<Value = [f64; 3]> {
    [-range..range, -range..range, -range..range]
}

/// `k` centers in `[-2, 2]^3`, pairwise at least 0.5 apart, mass in
/// `[0.1, 1]`.
pub fn config(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = InstantonConfig> {
    (0.1..1.0f64, prop::collection::vec(vec3(2.0), k))
        .prop_filter("centers too close", |(_, cs)| {
            cs.iter()
                .enumerate()
                .all(|(i, a)| cs[i + 1..].iter().all(|b| dist(*a, *b) >= 0.5))
        })
        .prop_map(|(m, cs)| InstantonConfig::new(m, cs).unwrap())
}

/// Far enough from every center and off every polar cone `|cos theta| > 0.9`,
/// so both charts are well conditioned for every center.
pub fn well_placed(config: &InstantonConfig, x: [f64; 3]) -> bool {
    config.centers().iter().all(|a| {
        let r = dist(x, *a);
        r >= 0.2 && ((x[2] - a[2]) / r).abs() <= 0.9
    })
}

pub fn far_from_centers(config: &InstantonConfig, x: [f64; 3]) -> bool {
    config.centers().iter().all(|a| dist(x, *a) >= 0.2)
}
