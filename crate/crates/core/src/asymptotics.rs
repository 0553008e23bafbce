//! Decay of curvature and of the deviation from the model `dx^2 + eta^2`,
//! measured as sups over spheres and log-log slopes.
//!
//! Far-field spheres are centered at the mass-weighted centroid of the
//! centers. The radius `rho` is the Euclidean `|x - centroid|`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::config::InstantonConfig;
use crate::connection::splitmix64;
use crate::error::{Error, Result};
use crate::geometry::{frame, ChartPoint, GhFields};
use crate::integrals::{fiber_length, model_inverse};
use crate::linalg::{self, Mat4};
use crate::quadrature::Evaluator;

/// Scalars whose sup over spheres is tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `|Riem|_g`.
    RiemNorm,
    /// `|g - h|_h`, the largest eigenvalue of `h^-1 (g - h)` in modulus.
    MetricDeviation,
    /// `|L(x) / L - 1|`.
    FiberDefect,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [
        Quantity::RiemNorm,
        Quantity::MetricDeviation,
        Quantity::FiberDefect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::RiemNorm => "riem_norm",
            Quantity::MetricDeviation => "metric_deviation",
            Quantity::FiberDefect => "fiber_defect",
        }
    }

    /// The exponent this quantity decays with on multi-Taub-NUT.
    pub fn expected_slope(self) -> f64 {
        match self {
            Quantity::RiemNorm => -3.0,
            Quantity::MetricDeviation | Quantity::FiberDefect => -1.0,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evaluates `quantity` at `x` with the automatic chart.
pub fn evaluate(config: &InstantonConfig, quantity: Quantity, x: [f64; 3]) -> Result<f64> {
    let p = ChartPoint::automatic(config, x);
    match quantity {
        Quantity::RiemNorm => Ok(frame(config, &p)?.riem_norm()),
        Quantity::MetricDeviation => metric_deviation(config, &p),
        Quantity::FiberDefect => Ok((fiber_length(config, x)? / config.fiber_period() - 1.0).abs()),
    }
}

/// Spectral norm of `g - h` measured in `h`.
pub fn metric_deviation(config: &InstantonConfig, p: &ChartPoint) -> Result<f64> {
    let fields = GhFields::at(config, p)?;
    let g = crate::geometry::metric_values(&fields.metric()?);
    let a = fields.a_values();
    let h_inv = model_inverse(a);
    let h = linalg::invert(&h_inv).ok_or(Error::SingularMetric)?;
    let l = linalg::cholesky(&h).ok_or(Error::SingularMetric)?;
    let d: Mat4 = core::array::from_fn(|i| core::array::from_fn(|j| g[i][j] - h[i][j]));
    // M = L^-1 D L^-T, built column by column
    let x: Mat4 = {
        let cols: [[f64; 4]; 4] = core::array::from_fn(|j| {
            linalg::forward_substitute(&l, [d[0][j], d[1][j], d[2][j], d[3][j]])
        });
        linalg::transpose(&cols)
    };
    let m_cols: [[f64; 4]; 4] = core::array::from_fn(|j| {
        linalg::forward_substitute(&l, [x[j][0], x[j][1], x[j][2], x[j][3]])
    });
    let m = linalg::transpose(&m_cols);
    let sym: Mat4 = core::array::from_fn(|i| core::array::from_fn(|j| 0.5 * (m[i][j] + m[j][i])));
    let e = linalg::symmetric_eigenvalues(&sym);
    Ok(e[0].abs().max(e[3].abs()))
}

/// Low-discrepancy points on the unit sphere: a Fibonacci lattice turned by
/// a fixed rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereSampler {
    pub count: usize,
    pub rotation: [[f64; 3]; 3],
}

impl SphereSampler {
    pub const DEFAULT_COUNT: usize = 2000;

    /// `count` points, rotation drawn deterministically from `seed`.
    pub fn from_seed(count: usize, seed: u64) -> Self {
        let u = |k: u64| (splitmix64(seed ^ splitmix64(k)) >> 11) as f64 / (1u64 << 53) as f64;
        // uniform unit quaternion (Shoemake)
        let (u1, u2, u3) = (u(1), u(2), u(3));
        let (s1, s2) = (libm::sqrt(1.0 - u1), libm::sqrt(u1));
        let q = [
            s1 * libm::sin(2.0 * PI * u2),
            s1 * libm::cos(2.0 * PI * u2),
            s2 * libm::sin(2.0 * PI * u3),
            s2 * libm::cos(2.0 * PI * u3),
        ];
        SphereSampler {
            count,
            rotation: quaternion_matrix(q),
        }
    }

    /// The same lattice followed by `r`.
    pub fn rotated(&self, r: [[f64; 3]; 3]) -> Self {
        let rot = core::array::from_fn(|i| {
            core::array::from_fn(|j| (0..3).map(|k| r[i][k] * self.rotation[k][j]).sum())
        });
        SphereSampler {
            count: self.count,
            rotation: rot,
        }
    }

    pub fn directions(&self) -> Vec<[f64; 3]> {
        let golden = PI * (3.0 - libm::sqrt(5.0));
        let n = self.count as f64;
        (0..self.count)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n;
                let r = libm::sqrt((1.0 - z * z).max(0.0));
                let phi = golden * i as f64;
                let p = [r * libm::cos(phi), r * libm::sin(phi), z];
                core::array::from_fn(|a| (0..3).map(|b| self.rotation[a][b] * p[b]).sum())
            })
            .collect()
    }
}

fn quaternion_matrix([x, y, z, w]: [f64; 4]) -> [[f64; 3]; 3] {
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
        ],
        [
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
        ],
        [
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Largest sampled value on a sphere and where it occurred.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereSup {
    pub value: f64,
    pub point: [f64; 3],
}

/// Sup of `quantity` over the sphere `S(center, radius)` sampled at
/// `sampler`'s nodes.
pub fn sup_on_sphere<E: Evaluator + ?Sized>(
    config: &InstantonConfig,
    quantity: Quantity,
    center: [f64; 3],
    radius: f64,
    sampler: &SphereSampler,
    eval: &E,
) -> Result<SphereSup> {
    let dirs = sampler.directions();
    let point =
        |i: usize| -> [f64; 3] { core::array::from_fn(|a| center[a] + radius * dirs[i][a]) };
    let values = eval.evaluate(dirs.len(), &|i| {
        let x = point(i);
        evaluate(config, quantity, x).map_err(|e| Error::QuadratureNode {
            index: i,
            point: x,
            source: alloc::boxed::Box::new(e),
        })
    })?;
    let mut best = SphereSup {
        value: 0.0,
        point: if dirs.is_empty() { center } else { point(0) },
    };
    for (i, v) in values.iter().enumerate() {
        if *v > best.value {
            best = SphereSup {
                value: *v,
                point: point(i),
            };
        }
    }
    Ok(best)
}

/// One point of a decay curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecaySample {
    pub radius: f64,
    pub value: f64,
}

/// Sups of `quantity` on centroid spheres of the given radii.
pub fn decay_samples<E: Evaluator + ?Sized>(
    config: &InstantonConfig,
    quantity: Quantity,
    radii: &[f64],
    sampler: &SphereSampler,
    eval: &E,
) -> Result<Vec<DecaySample>> {
    let c = config.centroid();
    radii
        .iter()
        .map(|r| {
            sup_on_sphere(config, quantity, c, *r, sampler, eval).map(|s| DecaySample {
                radius: *r,
                value: s.value,
            })
        })
        .collect()
}

/// `(8, 16, 32, 64, 128)` times the configuration length scale.
pub fn default_decay_radii(config: &InstantonConfig) -> Vec<f64> {
    let l = config.length_scale();
    [8.0, 16.0, 32.0, 64.0, 128.0]
        .iter()
        .map(|f| f * l)
        .collect()
}

/// Least-squares line through `(log R, log value)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest deviation of a sample from the line, in `log value`.
    pub residual: f64,
    pub radii_range: (f64, f64),
}

/// Fits `value ~ exp(intercept) R^slope`. Needs at least four samples with
/// strictly increasing radii spanning two octaves and positive values.
pub fn fit_exponent(samples: &[DecaySample]) -> Result<ExponentFit> {
    if samples.len() < 4 {
        return Err(Error::DegenerateSamples("fewer than 4 samples"));
    }
    if samples
        .iter()
        .any(|s| !(s.value > 0.0) || !s.value.is_finite())
    {
        return Err(Error::DegenerateSamples("non-positive value"));
    }
    if samples
        .iter()
        .any(|s| !(s.radius > 0.0) || !s.radius.is_finite())
    {
        return Err(Error::DegenerateSamples("non-positive radius"));
    }
    if samples.windows(2).any(|w| !(w[1].radius > w[0].radius)) {
        return Err(Error::DegenerateSamples("radii not strictly increasing"));
    }
    let (r0, r1) = (samples[0].radius, samples[samples.len() - 1].radius);
    if r1 < 4.0 * r0 {
        return Err(Error::DegenerateSamples("radii span less than two octaves"));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| libm::log(s.radius)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| libm::log(s.value)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
        radii_range: (r0, r1),
    })
}

/// Sup of `|Riem|` on shrinking spheres around one center.
#[derive(Clone, Debug, PartialEq)]
pub struct NutReport {
    pub center: usize,
    /// In the order of the radii given, normally decreasing.
    pub samples: Vec<DecaySample>,
    /// Last sampled value.
    pub plateau: f64,
    /// `max / min` over the last three samples.
    pub ratio: f64,
    pub bounded: bool,
}

/// Largest `max/min` ratio of the last three samples still counted as
/// bounded.
pub const NUT_RATIO_BOUND: f64 = 2.0;

pub fn nut_boundedness<E: Evaluator + ?Sized>(
    config: &InstantonConfig,
    center: usize,
    radii: &[f64],
    sampler: &SphereSampler,
    eval: &E,
) -> Result<NutReport> {
    if center >= config.k() {
        return Err(Error::CenterIndex {
            index: center,
            count: config.k(),
        });
    }
    if radii.len() < 3 {
        return Err(Error::ScheduleTooShort {
            len: radii.len(),
            min: 3,
        });
    }
    let min = 10.0 * config.exclusion_radius();
    if let Some(r) = radii.iter().find(|r| !(**r >= min)) {
        return Err(Error::RadiusTooSmall { radius: *r, min });
    }
    let a = config.centers()[center];
    let samples = radii
        .iter()
        .map(|r| {
            sup_on_sphere(config, Quantity::RiemNorm, a, *r, sampler, eval).map(|s| DecaySample {
                radius: *r,
                value: s.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = &samples[samples.len() - 3..];
    let hi = tail
        .iter()
        .map(|s| s.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let ratio = hi / lo;
    Ok(NutReport {
        center,
        plateau: samples[samples.len() - 1].value,
        ratio,
        bounded: ratio.is_finite() && ratio <= NUT_RATIO_BOUND,
        samples,
    })
}

/// Six radii decreasing geometrically from a quarter of the local spacing
/// down to `10 epsilon`.
pub fn default_nut_radii(config: &InstantonConfig) -> Vec<f64> {
    let floor = 10.0 * config.exclusion_radius();
    let sep = config.min_separation();
    let top = if sep.is_finite() {
        0.25 * sep
    } else {
        0.25 * config.length_scale()
    };
    let top = top.max(floor);
    (0..6)
        .map(|j| {
            if j == 5 {
                floor
            } else {
                (top * libm::pow(floor / top, j as f64 / 5.0)).max(floor)
            }
        })
        .collect()
}

/// [`nut_boundedness`] for every center with [`default_nut_radii`]; empty
/// for the flat model.
pub fn nut_boundedness_all<E: Evaluator + ?Sized>(
    config: &InstantonConfig,
    sampler: &SphereSampler,
    eval: &E,
) -> Result<Vec<NutReport>> {
    let radii = default_nut_radii(config);
    (0..config.k())
        .map(|i| nut_boundedness(config, i, &radii, sampler, eval))
        .collect()
}
