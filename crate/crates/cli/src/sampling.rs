//! Seeded random points and configurations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taubnut_core::InstantonConfig;

/// Stream for one consumer: the run seed mixed with a label, so checks draw
/// independent points whatever order they run in.
pub fn rng(seed: u64, label: &str) -> ChaCha8Rng {
    // FNV-1a over the label
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Which points a check may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Outside the keep-out balls around the centers.
    Admissible,
    /// Also outside the cones `|cos theta_i| > 0.9` about every center, where
    /// both gauge charts are well conditioned.
    BothCharts,
}

/// Half-width of the sampling box around the centroid.
pub fn box_half_width(config: &InstantonConfig) -> f64 {
    let c = config.centroid();
    let spread = config
        .centers()
        .iter()
        .map(|a| dist(*a, c))
        .fold(0.0, f64::max);
    1.5 * spread + 1.0 + 4.0 * config.mass()
}

/// Keep-out radius around each center used for random sampling.
pub fn keep_out(config: &InstantonConfig) -> f64 {
    let sep = config.min_separation();
    let local = if sep.is_finite() {
        0.1 * (0.5 * sep).min(1.0)
    } else {
        0.1
    };
    local.max(10.0 * config.exclusion_radius())
}

pub fn accepts(config: &InstantonConfig, region: Region, x: [f64; 3]) -> bool {
    let r_min = keep_out(config);
    config.centers().iter().all(|a| {
        let r = dist(x, *a);
        r >= r_min && (region == Region::Admissible || ((x[2] - a[2]) / r).abs() <= 0.9)
    })
}

/// `n` points drawn uniformly from the sampling box, rejecting those outside
/// `region`.
pub fn random_points(
    config: &InstantonConfig,
    region: Region,
    n: usize,
    seed: u64,
    label: &str,
) -> Vec<[f64; 3]> {
    let mut rng = rng(seed, label);
    let c = config.centroid();
    let w = box_half_width(config);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = [
            c[0] + rng.random_range(-w..w),
            c[1] + rng.random_range(-w..w),
            c[2] + rng.random_range(-w..w),
        ];
        if accepts(config, region, x) {
            out.push(x);
        }
    }
    out
}

/// `k` centers uniform in `[-2, 2]^3` with pairwise distance at least 0.5.
pub fn random_config(k: usize, mass: f64, seed: u64) -> InstantonConfig {
    let mut rng = rng(seed, "random-config");
    let mut centers: Vec<[f64; 3]> = Vec::with_capacity(k);
    while centers.len() < k {
        let a = [
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        ];
        if centers.iter().all(|b| dist(a, *b) >= 0.5) {
            centers.push(a);
        }
    }
    InstantonConfig::new(mass, centers).expect("separated centers form a valid configuration")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let c = random_config(3, 0.25, 7);
        assert_eq!(c, random_config(3, 0.25, 7));
        let a = random_points(&c, Region::BothCharts, 20, 1, "a");
        assert_eq!(a, random_points(&c, Region::BothCharts, 20, 1, "a"));
        assert_ne!(a, random_points(&c, Region::BothCharts, 20, 1, "b"));
        assert!(a.iter().all(|x| accepts(&c, Region::BothCharts, *x)));
    }
}
