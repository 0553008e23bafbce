//! The verification suite: one function per check, run in parallel and
//! assembled in a fixed order.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use taubnut_core::asymptotics::{
    decay_samples, default_decay_radii, default_nut_radii, fit_exponent, nut_boundedness, Quantity,
    SphereSampler,
};
use taubnut_core::connection::{total_connection, transition_consistency, verify_curvature};
use taubnut_core::fd::{fd_oracle, relative_error};
use taubnut_core::geometry::{
    frame, inverse_metric_closed_form, laplace_beltrami, metric, metric_values, GhFields,
};
use taubnut_core::hyperkahler::{closedness_residual, killing_moment_check, quaternion_check};
use taubnut_core::integrals::{
    default_mass_radii, fiber_length, flux_additivity, flux_with, mass, mass_at_radius,
    small_sphere_radius, tube_volume, GaugePolicy, IntegralOptions, MassReport, VolumeOptions,
};
use taubnut_core::linalg;
use taubnut_core::potential::{eval_v, harmonic_residual_v, hessian_scale};
use taubnut_core::{ChartPoint, GaugeChart, InstantonConfig, Jet2};

use crate::manifest::RunManifest;
use crate::parallel::Rayon;
use crate::report::{CheckRecord, Provenance, VerificationReport};
use crate::sampling::{random_points, Region};

/// Smallest angle to a Dirac string at which a randomly flipped chart is used.
const MIXED_MIN_ANGLE: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    Harmonicity,
    ConnectionCurvature,
    ChartTransition,
    MetricInverse,
    RicciFlatness,
    RiemannSymmetry,
    KahlerClosedness,
    Quaternion,
    KillingMoment,
    KillingCoframe,
    HarmonicCoordinates,
    JetOracle,
    GaugeInvariance,
    FluxQuantization,
    FluxAdditivity,
    Mass,
    MassFluxIdentity,
    FiberLength,
    VolumeGrowth,
    RiemDecay,
    MetricDeviationDecay,
    FiberDefectDecay,
    NutBoundedness,
}

impl CheckName {
    pub const ALL: [CheckName; 23] = [
        CheckName::Harmonicity,
        CheckName::ConnectionCurvature,
        CheckName::ChartTransition,
        CheckName::MetricInverse,
        CheckName::RicciFlatness,
        CheckName::RiemannSymmetry,
        CheckName::KahlerClosedness,
        CheckName::Quaternion,
        CheckName::KillingMoment,
        CheckName::KillingCoframe,
        CheckName::HarmonicCoordinates,
        CheckName::JetOracle,
        CheckName::GaugeInvariance,
        CheckName::FluxQuantization,
        CheckName::FluxAdditivity,
        CheckName::Mass,
        CheckName::MassFluxIdentity,
        CheckName::FiberLength,
        CheckName::VolumeGrowth,
        CheckName::RiemDecay,
        CheckName::MetricDeviationDecay,
        CheckName::FiberDefectDecay,
        CheckName::NutBoundedness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Harmonicity => "harmonicity",
            CheckName::ConnectionCurvature => "connection-curvature",
            CheckName::ChartTransition => "chart-transition",
            CheckName::MetricInverse => "metric-inverse",
            CheckName::RicciFlatness => "ricci-flatness",
            CheckName::RiemannSymmetry => "riemann-symmetry",
            CheckName::KahlerClosedness => "kahler-closedness",
            CheckName::Quaternion => "quaternion",
            CheckName::KillingMoment => "killing-moment",
            CheckName::KillingCoframe => "killing-coframe",
            CheckName::HarmonicCoordinates => "harmonic-coordinates",
            CheckName::JetOracle => "jet-oracle",
            CheckName::GaugeInvariance => "gauge-invariance",
            CheckName::FluxQuantization => "flux-quantization",
            CheckName::FluxAdditivity => "flux-additivity",
            CheckName::Mass => "mass",
            CheckName::MassFluxIdentity => "mass-flux-identity",
            CheckName::FiberLength => "fiber-length",
            CheckName::VolumeGrowth => "volume-growth",
            CheckName::RiemDecay => "riem-decay",
            CheckName::MetricDeviationDecay => "metric-deviation-decay",
            CheckName::FiberDefectDecay => "fiber-defect-decay",
            CheckName::NutBoundedness => "nut-boundedness",
        }
    }

    pub fn parse(s: &str) -> Option<CheckName> {
        CheckName::ALL.iter().copied().find(|c| c.as_str() == s)
    }

    pub fn description(self) -> &'static str {
        match self {
            CheckName::Harmonicity => "|Laplacian V| / (1 + |Hess V|) at random points",
            CheckName::ConnectionCurvature => "relative |d eta - *dV| with randomly mixed charts",
            CheckName::ChartTransition => {
                "A_S - A_N = 4m dphi and unit winding of every transition"
            }
            CheckName::MetricInverse => "closed-form inverse vs generic inversion, det g = V^2",
            CheckName::RicciFlatness => "max |Ric| / (1 + |Riem|)",
            CheckName::RiemannSymmetry => {
                "pair (anti)symmetries and first Bianchi identity, relative"
            }
            CheckName::KahlerClosedness => "|d omega| for the three Kahler forms, relative",
            CheckName::Quaternion => {
                "I^2 = J^2 = K^2 = -1, IJ = K, compatibility, pullbacks, omega^2 = 2 vol"
            }
            CheckName::KillingMoment => "iota_W omega = -dx, |W|^-2 = V, L_W g = 0, alpha = eta/V",
            CheckName::KillingCoframe => {
                "dx_k and alpha g-orthogonal of equal norm, dx_k = I_k alpha"
            }
            CheckName::HarmonicCoordinates => "|Laplace-Beltrami x_k|",
            CheckName::JetOracle => "jets of V, A, g vs finite differences, relative",
            CheckName::GaugeInvariance => {
                "|Riem|, Ricci residual, flux and mass across chart choices"
            }
            CheckName::FluxQuantization => "chern(small sphere) = -1, chern(large sphere) = -k",
            CheckName::FluxAdditivity => "large-sphere flux = sum of small-sphere fluxes",
            CheckName::Mass => "extrapolated boundary mass vs k m (relative; absolute when k = 0)",
            CheckName::MassFluxIdentity => "-8 pi mass = L c_1 at infinity (relative)",
            CheckName::FiberLength => "1 - L(x)/L far out, monotone along a ray; exact when k = 0",
            CheckName::VolumeGrowth => "vol / R^3 vs (4 pi / 3) L and doubling ratio vs 8",
            CheckName::RiemDecay => "|slope + 3| of sup |Riem| (sup itself when k = 0)",
            CheckName::MetricDeviationDecay => {
                "|slope + 1| of sup |g - h|_h (sup itself when k = 0)"
            }
            CheckName::FiberDefectDecay => "|slope + 1| of sup |L/L - 1| (sup itself when k = 0)",
            CheckName::NutBoundedness => {
                "max/min of sup |Riem| on the three smallest spheres at each NUT"
            }
        }
    }

    /// Tolerance before `tol_scale`. Some checks measure an absolute quantity
    /// on the flat model and use a tighter bound there.
    pub fn default_tolerance(self, flat: bool) -> f64 {
        match self {
            CheckName::Harmonicity => 1e-10,
            CheckName::ConnectionCurvature => 1e-9,
            CheckName::ChartTransition => 1e-9,
            CheckName::MetricInverse => 1e-12,
            CheckName::RicciFlatness => 1e-8,
            CheckName::RiemannSymmetry => 1e-9,
            CheckName::KahlerClosedness => 1e-9,
            CheckName::Quaternion => 1e-10,
            CheckName::KillingMoment => 1e-12,
            CheckName::KillingCoframe => 1e-10,
            CheckName::HarmonicCoordinates => 1e-9,
            CheckName::JetOracle => 1e-6,
            CheckName::GaugeInvariance => 1e-9,
            CheckName::FluxQuantization => 1e-8,
            CheckName::FluxAdditivity => 1e-9,
            CheckName::Mass | CheckName::MassFluxIdentity if flat => 1e-9,
            CheckName::Mass | CheckName::MassFluxIdentity => 0.01,
            CheckName::FiberLength => 1e-3,
            CheckName::VolumeGrowth => 0.02,
            CheckName::RiemDecay
            | CheckName::MetricDeviationDecay
            | CheckName::FiberDefectDecay
                if flat =>
            {
                1e-12
            }
            CheckName::RiemDecay
            | CheckName::MetricDeviationDecay
            | CheckName::FiberDefectDecay => 0.05,
            CheckName::NutBoundedness => taubnut_core::asymptotics::NUT_RATIO_BOUND,
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Each identity the models are expected to satisfy, with the check that
/// exercises it.
pub const IDENTITY_CHECKLIST: &[(&str, CheckName)] = &[
    ("V is harmonic off the centers", CheckName::Harmonicity),
    ("d eta = *dV", CheckName::ConnectionCurvature),
    (
        "chart transitions shift the fibre by one period",
        CheckName::ChartTransition,
    ),
    ("g is Ricci-flat", CheckName::RicciFlatness),
    (
        "omega_I, omega_J, omega_K are closed",
        CheckName::KahlerClosedness,
    ),
    (
        "I, J, K satisfy the quaternion relations",
        CheckName::Quaternion,
    ),
    ("iota_W omega_I = -dx_1", CheckName::KillingMoment),
    ("|W|^-2 = V", CheckName::KillingMoment),
    (
        "dx_k and alpha are orthogonal with equal norm",
        CheckName::KillingCoframe,
    ),
    (
        "the coordinates x_k are g-harmonic",
        CheckName::HarmonicCoordinates,
    ),
    (
        "small-sphere Chern number is -1",
        CheckName::FluxQuantization,
    ),
    (
        "large-sphere Chern number is -k",
        CheckName::FluxQuantization,
    ),
    ("flux is additive over centers", CheckName::FluxAdditivity),
    ("mass equals sum m_i", CheckName::Mass),
    (
        "-8 pi mass = L c_1 at infinity",
        CheckName::MassFluxIdentity,
    ),
    ("fibre length tends to 8 pi m", CheckName::FiberLength),
    ("volume growth is cubic", CheckName::VolumeGrowth),
    ("curvature decays like |x|^-3", CheckName::RiemDecay),
    (
        "g approaches dx^2 + eta^2 like |x|^-1",
        CheckName::MetricDeviationDecay,
    ),
    (
        "fibre-length defect decays like |x|^-1",
        CheckName::FiberDefectDecay,
    ),
    (
        "curvature stays bounded at the NUTs",
        CheckName::NutBoundedness,
    ),
    ("k = 0 is flat R^3 x S^1", CheckName::RiemDecay),
];

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("invalid configuration: {0}")]
    Config(#[source] taubnut_core::Error),
    #[error("check {check} failed to run: {source}")]
    Check {
        check: CheckName,
        #[source]
        source: taubnut_core::Error,
    },
    #[error("check {check} failed to run at {point:?}: {source}")]
    AtPoint {
        check: CheckName,
        point: [f64; 3],
        #[source]
        source: taubnut_core::Error,
    },
}

/// What a check measured, before comparison with its tolerance.
#[derive(Clone, Debug, Default)]
pub struct Measurement {
    pub value: f64,
    pub samples: usize,
    pub worst_point: Option<[f64; 3]>,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl Measurement {
    fn scalar(value: f64, samples: usize) -> Self {
        Measurement {
            value,
            samples,
            ..Default::default()
        }
    }

    fn detail(mut self, key: &str, value: serde_json::Value) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }
}

type CheckResult = Result<Measurement, Failure>;

/// A check that could not be evaluated.
#[derive(Debug)]
pub struct Failure {
    point: Option<[f64; 3]>,
    source: taubnut_core::Error,
}

impl From<taubnut_core::Error> for Failure {
    fn from(source: taubnut_core::Error) -> Self {
        Failure {
            point: None,
            source,
        }
    }
}

/// Shared inputs of one suite run.
pub struct Context<'a> {
    pub config: InstantonConfig,
    pub manifest: &'a RunManifest,
    mass: OnceLock<Result<MassReport, taubnut_core::Error>>,
}

impl<'a> Context<'a> {
    pub fn new(manifest: &'a RunManifest) -> Result<Self, SuiteError> {
        let config = manifest.config.build().map_err(SuiteError::Config)?;
        Ok(Context {
            config,
            manifest,
            mass: OnceLock::new(),
        })
    }

    fn seed(&self) -> u64 {
        self.manifest.seed
    }

    fn points(&self, region: Region, n: usize, label: &str) -> Vec<[f64; 3]> {
        random_points(&self.config, region, n, self.seed(), label)
    }

    fn integral_options(&self) -> IntegralOptions {
        IntegralOptions {
            n_theta: self.manifest.samples.n_theta,
            n_phi: self.manifest.samples.n_phi,
            ..Default::default()
        }
    }

    fn sampler(&self) -> SphereSampler {
        SphereSampler::from_seed(self.manifest.samples.sphere_nodes, self.seed())
    }

    pub fn mass_radii(&self) -> Vec<f64> {
        self.manifest
            .radii
            .mass
            .clone()
            .unwrap_or_else(|| default_mass_radii(&self.config))
    }

    pub fn decay_radii(&self) -> Vec<f64> {
        self.manifest
            .radii
            .decay
            .clone()
            .unwrap_or_else(|| default_decay_radii(&self.config))
    }

    pub fn volume_radius(&self) -> f64 {
        self.manifest
            .radii
            .volume
            .unwrap_or_else(|| 64.0 * self.config.length_scale())
    }

    fn large_radius(&self) -> f64 {
        8.0 * self.config.length_scale()
    }

    /// The mass computation is shared by two checks.
    pub fn mass_report(&self) -> Result<MassReport, taubnut_core::Error> {
        self.mass
            .get_or_init(|| {
                mass(
                    &self.config,
                    &self.mass_radii(),
                    &self.integral_options(),
                    &Rayon,
                )
            })
            .clone()
    }

    fn chern(&self, center: [f64; 3], radius: f64) -> Result<f64, taubnut_core::Error> {
        Ok(flux_with(
            &self.config,
            center,
            radius,
            &self.integral_options(),
            &Rayon,
        )? / self.config.fiber_period())
    }

    fn flat(&self) -> bool {
        self.config.k() == 0
    }
}

/// Maximum of `f` over `points`, evaluated in parallel. Ties go to the
/// earliest point and NaN counts as infinite.
fn max_over<F>(points: &[[f64; 3]], f: F) -> CheckResult
where
    F: Fn(usize, [f64; 3]) -> Result<f64, taubnut_core::Error> + Sync,
{
    let values: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| f(i, *x))
        .collect();
    let mut best = Measurement::scalar(0.0, points.len());
    for (x, v) in points.iter().zip(values) {
        let v = v.map_err(|source| Failure {
            point: Some(*x),
            source,
        })?;
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if best.worst_point.is_none() || v > best.value {
            best.value = v;
            best.worst_point = Some(*x);
        }
    }
    Ok(best)
}

fn mixed_gauge(ctx: &Context, x: [f64; 3], salt: u64) -> GaugeChart {
    GaugeChart::mixed(&ctx.config, x, ctx.seed(), salt, MIXED_MIN_ANGLE)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn harmonicity(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.points,
        "harmonicity",
    );
    max_over(&pts, |_, x| {
        let v = eval_v(&ctx.config, x)?;
        Ok(harmonic_residual_v(&ctx.config, x)?.abs() / hessian_scale(&v))
    })
}

fn connection_curvature(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::BothCharts,
        ctx.manifest.samples.points,
        "connection-curvature",
    );
    max_over(&pts, |i, x| {
        verify_curvature(&ctx.config, &mixed_gauge(ctx, x, i as u64), x)
    })
}

fn chart_transition(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::BothCharts,
        ctx.manifest.samples.points / 5,
        "chart-transition",
    );
    let mut m = max_over(&pts, |_, x| {
        let mut worst: f64 = 0.0;
        for i in 0..ctx.config.k() {
            let t = transition_consistency(&ctx.config, i, x)?;
            worst = worst.max(t.residual).max((t.winding - 1.0).abs());
        }
        Ok(worst)
    })?;
    m.samples *= ctx.config.k();
    Ok(m)
}

fn metric_inverse(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.oracle_points,
        "metric-inverse",
    );
    max_over(&pts, |_, x| {
        let p = ChartPoint::automatic(&ctx.config, x);
        let fields = GhFields::at(&ctx.config, &p)?;
        let g = metric_values(&fields.metric()?);
        let closed = inverse_metric_closed_form(fields.v.value, fields.a_values());
        let generic = linalg::invert(&g).ok_or(taubnut_core::Error::SingularMetric)?;
        let inv = linalg::max_abs_diff(&closed, &generic) / linalg::max_abs(&closed);
        let id = linalg::max_abs_diff(&linalg::mul(&g, &closed), &linalg::IDENTITY);
        let v = fields.v.value;
        let det = (linalg::determinant(&g) / (v * v) - 1.0).abs();
        Ok(inv.max(id).max(det))
    })
}

fn ricci_flatness(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.points,
        "ricci-flatness",
    );
    max_over(&pts, |_, x| {
        let f = frame(&ctx.config, &ChartPoint::automatic(&ctx.config, x))?;
        Ok(f.ricci_max_abs() / (1.0 + f.riem_norm()))
    })
}

fn riemann_symmetry(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.points,
        "riemann-symmetry",
    );
    max_over(&pts, |_, x| {
        Ok(frame(&ctx.config, &ChartPoint::automatic(&ctx.config, x))?.riemann_symmetry_residual())
    })
}

fn kahler_closedness(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.points,
        "kahler-closedness",
    );
    max_over(&pts, |_, x| {
        let r = closedness_residual(&ctx.config, &ChartPoint::automatic(&ctx.config, x))?;
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn quaternion(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.points,
        "quaternion",
    );
    max_over(&pts, |_, x| {
        Ok(quaternion_check(&ctx.config, &ChartPoint::automatic(&ctx.config, x))?.max_residual())
    })
}

fn killing_moment(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.points,
        "killing-moment",
    );
    max_over(&pts, |_, x| {
        let k = killing_moment_check(&ctx.config, &ChartPoint::automatic(&ctx.config, x))?;
        Ok(k.moment
            .iter()
            .copied()
            .chain([k.lie_derivative, k.v_from_w, k.alpha_vs_eta])
            .fold(0.0, f64::max))
    })
}

fn killing_coframe(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.points,
        "killing-coframe",
    );
    max_over(&pts, |_, x| {
        let k = killing_moment_check(&ctx.config, &ChartPoint::automatic(&ctx.config, x))?;
        Ok(k.alpha_relation.iter().copied().fold(k.coframe, f64::max))
    })
}

fn harmonic_coordinates(ctx: &Context) -> CheckResult {
    let pts = ctx.points(
        Region::Admissible,
        ctx.manifest.samples.harmonic_points,
        "harmonic-coordinates",
    );
    max_over(&pts, |_, x| {
        let p = ChartPoint::automatic(&ctx.config, x);
        let mut worst: f64 = 0.0;
        for k in 0..3 {
            worst = worst.max(laplace_beltrami(&ctx.config, &p, |y| y[k])?.abs());
        }
        Ok(worst)
    })
}

fn jet_error(jet: &Jet2, f: impl Fn([f64; 3]) -> f64, x: [f64; 3], h: f64) -> f64 {
    let (grad, hess) = fd_oracle(f, x, h);
    let g = if jet.gradient == [0.0; 3] && grad.iter().all(|v| v.abs() < 1e-12) {
        0.0
    } else {
        relative_error(&jet.gradient, &grad)
    };
    let hj = jet.hessian_matrix();
    let h = if hj.as_flattened().iter().all(|v| *v == 0.0)
        && hess.as_flattened().iter().all(|v| v.abs() < 1e-9)
    {
        0.0
    } else {
        relative_error(hj.as_flattened(), hess.as_flattened())
    };
    g.max(h)
}

fn jet_oracle(ctx: &Context) -> CheckResult {
    let c = &ctx.config;
    let pts = ctx.points(
        Region::BothCharts,
        ctx.manifest.samples.oracle_points,
        "jet-oracle",
    );
    max_over(&pts, |_, x| {
        let r = c.centers().iter().map(|a| dist(*a, x)).fold(1.0, f64::min);
        let h = 2e-3 * r;
        let gauge = GaugeChart::automatic(c, x);
        let mut worst = jet_error(
            &eval_v(c, x)?,
            |y| eval_v(c, y).map(|v| v.value).unwrap_or(f64::NAN),
            x,
            h,
        );
        let a = total_connection(c, &gauge, x, 0.0)?;
        for d in 0..3 {
            let f = |y| {
                total_connection(c, &gauge, y, 0.0)
                    .map(|a| a.spatial[d].value)
                    .unwrap_or(f64::NAN)
            };
            worst = worst.max(jet_error(&a.spatial[d], f, x, h));
        }
        let p = ChartPoint::new(x, 0.0, gauge.clone());
        let g = metric(c, &p)?;
        for i in 0..4 {
            for j in i..4 {
                let f = |y| {
                    metric(c, &ChartPoint::new(y, 0.0, gauge.clone()))
                        .map(|g| g[i][j].value)
                        .unwrap_or(f64::NAN)
                };
                worst = worst.max(jet_error(&g[i][j], f, x, h));
            }
        }
        Ok(worst)
    })
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn gauge_invariance(ctx: &Context) -> CheckResult {
    let c = &ctx.config;
    let pts = ctx.points(
        Region::BothCharts,
        ctx.manifest.samples.points / 5,
        "gauge-invariance",
    );
    let mut m = max_over(&pts, |i, x| {
        let auto = frame(c, &ChartPoint::automatic(c, x))?;
        let mixed = frame(c, &ChartPoint::new(x, 0.0, mixed_gauge(ctx, x, i as u64)))?;
        let riem = rel_diff(auto.riem_norm(), mixed.riem_norm());
        let ric = (auto.ricci_max_abs() - mixed.ricci_max_abs()).abs() / (1.0 + auto.riem_norm());
        Ok(riem.max(ric))
    })?;
    let pointwise = m.value;
    let opts = ctx.integral_options();
    let mixed = IntegralOptions {
        gauge: GaugePolicy::Mixed {
            seed: ctx.seed(),
            min_angle: MIXED_MIN_ANGLE,
        },
        ..opts
    };
    let r = small_sphere_radius(c);
    let mut flux_diff: f64 = 0.0;
    for a in c.centers() {
        let f0 = flux_with(c, *a, r, &opts, &Rayon)?;
        let f1 = flux_with(c, *a, r, &mixed, &Rayon)?;
        flux_diff = flux_diff.max(rel_diff(f0, f1));
    }
    let radius = ctx.mass_radii()[0];
    let (m0, _) = mass_at_radius(c, radius, &opts, &Rayon)?;
    let (m1, _) = mass_at_radius(c, radius, &mixed, &Rayon)?;
    let mass_diff = rel_diff(m0, m1);
    m.value = pointwise.max(flux_diff).max(mass_diff);
    m.samples += c.k() + 1;
    Ok(m.detail("pointwise", json!(pointwise))
        .detail("flux", json!(flux_diff))
        .detail("mass", json!(mass_diff)))
}

fn flux_quantization(ctx: &Context) -> CheckResult {
    let c = &ctx.config;
    let r = small_sphere_radius(c);
    let small = c
        .centers()
        .iter()
        .map(|a| ctx.chern(*a, r))
        .collect::<Result<Vec<_>, _>>()?;
    let large = ctx.chern(c.centroid(), ctx.large_radius())?;
    let mut value = (large + c.k() as f64).abs();
    let mut worst_point = None;
    for (a, ch) in c.centers().iter().zip(&small) {
        let e = (ch + 1.0).abs();
        if !(e <= value) {
            value = e;
            worst_point = Some(*a);
        }
    }
    Ok(Measurement {
        value,
        samples: small.len() + 1,
        worst_point,
        details: BTreeMap::new(),
    }
    .detail("small", json!(small))
    .detail("large", json!(large))
    .detail("small_radius", json!(r))
    .detail("large_radius", json!(ctx.large_radius())))
}

fn flux_additivity_check(ctx: &Context) -> CheckResult {
    let c = &ctx.config;
    let a = flux_additivity(
        c,
        ctx.large_radius(),
        small_sphere_radius(c),
        &ctx.integral_options(),
        &Rayon,
    )?;
    Ok(Measurement::scalar(a.residual, c.k() + 1)
        .detail("large", json!(a.large))
        .detail("small", json!(a.small)))
}

fn mass_check(ctx: &Context) -> CheckResult {
    let report = ctx.mass_report()?;
    let expected = ctx.config.total_mass();
    let value = if ctx.flat() {
        report.extrapolated.abs()
    } else {
        (report.extrapolated / expected - 1.0).abs()
    };
    Ok(Measurement::scalar(value, report.radii.len())
        .detail("radii", json!(report.radii))
        .detail("estimates", json!(report.estimates))
        .detail("extrapolated", json!(report.extrapolated))
        .detail("expected", json!(expected))
        .detail("fiber_defect", json!(report.fiber_defect))
        .detail("difference_ratios", json!(report.difference_ratios)))
}

fn mass_flux_identity(ctx: &Context) -> CheckResult {
    let c = &ctx.config;
    let report = ctx.mass_report()?;
    let c_inf = ctx.chern(c.centroid(), ctx.large_radius())?;
    let lhs = -8.0 * PI * report.extrapolated;
    let rhs = c.fiber_period() * c_inf;
    let value = if ctx.flat() {
        (lhs - rhs).abs()
    } else {
        rel_diff(lhs, rhs)
    };
    Ok(Measurement::scalar(value, report.radii.len() + 1)
        .detail("minus_8_pi_mass", json!(lhs))
        .detail("period_times_chern", json!(rhs)))
}

fn fiber_length_check(ctx: &Context) -> CheckResult {
    let c = &ctx.config;
    let l_inf = c.fiber_period();
    let o = c.centroid();
    let far = 1e4 * c.length_scale().max(c.diameter());
    let ray: Vec<f64> = (0..=8).map(|j| far * 0.5f64.powi(8 - j)).collect();
    let lengths = ray
        .iter()
        .map(|r| fiber_length(c, [o[0], o[1], o[2] + r]))
        .collect::<Result<Vec<_>, _>>()?;
    let monotone = lengths.windows(2).all(|w| w[1] >= w[0]) && lengths.iter().all(|l| *l <= l_inf);
    let defect = 1.0 - lengths[lengths.len() - 1] / l_inf;
    let mut m = Measurement::scalar(if monotone { defect } else { f64::INFINITY }, lengths.len());
    if ctx.flat() {
        let pts = ctx.points(
            Region::Admissible,
            ctx.manifest.samples.points,
            "fiber-length",
        );
        let exact = max_over(&pts, |_, x| Ok((fiber_length(c, x)? - l_inf).abs()))?;
        m.value = m.value.max(exact.value);
        m.samples += exact.samples;
    }
    Ok(m.detail("ray_radii", json!(ray))
        .detail("lengths", json!(lengths))
        .detail("asymptotic_length", json!(l_inf)))
}

fn volume_growth(ctx: &Context) -> CheckResult {
    let c = &ctx.config;
    let r = ctx.volume_radius();
    let opts = VolumeOptions::default();
    let v1 = tube_volume(c, r, &opts)?;
    let v2 = tube_volume(c, 2.0 * r, &opts)?;
    let model = 4.0 * PI / 3.0 * c.fiber_period();
    let ratio = v1 / (r * r * r) / model;
    let doubling = v2 / v1;
    let value = (ratio - 1.0).abs().max((doubling / 8.0 - 1.0).abs());
    Ok(Measurement::scalar(value, 2)
        .detail("radius", json!(r))
        .detail("volume", json!(v1))
        .detail("volume_over_model", json!(ratio))
        .detail("doubling_ratio", json!(doubling)))
}

fn decay(ctx: &Context, q: Quantity) -> CheckResult {
    let radii = ctx.decay_radii();
    let samples = decay_samples(&ctx.config, q, &radii, &ctx.sampler(), &Rayon)?;
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let n = samples.len() * ctx.manifest.samples.sphere_nodes;
    if ctx.flat() {
        let sup = values.iter().copied().fold(0.0, f64::max);
        return Ok(Measurement::scalar(sup, n)
            .detail("radii", json!(radii))
            .detail("values", json!(values)));
    }
    let fit = fit_exponent(&samples)?;
    Ok(
        Measurement::scalar((fit.slope - q.expected_slope()).abs(), n)
            .detail("radii", json!(radii))
            .detail("values", json!(values))
            .detail("slope", json!(fit.slope))
            .detail("intercept", json!(fit.intercept))
            .detail("fit_residual", json!(fit.residual)),
    )
}

fn nut_check(ctx: &Context) -> CheckResult {
    let c = &ctx.config;
    let radii = default_nut_radii(c);
    let sampler = ctx.sampler();
    let mut m = Measurement::scalar(0.0, 0);
    let mut plateaus = Vec::new();
    for i in 0..c.k() {
        let r = nut_boundedness(c, i, &radii, &sampler, &Rayon)?;
        if !(r.ratio <= m.value) {
            m.value = r.ratio;
            m.worst_point = Some(c.centers()[i]);
        }
        m.samples += r.samples.len() * sampler.count;
        plateaus.push(r.plateau);
    }
    Ok(m.detail("radii", json!(radii))
        .detail("plateaus", json!(plateaus)))
}

/// Runs one check and compares it with its tolerance.
pub fn run_check(ctx: &Context, check: CheckName) -> Result<(CheckRecord, f64), SuiteError> {
    let start = Instant::now();
    let result = match check {
        CheckName::Harmonicity => harmonicity(ctx),
        CheckName::ConnectionCurvature => connection_curvature(ctx),
        CheckName::ChartTransition => chart_transition(ctx),
        CheckName::MetricInverse => metric_inverse(ctx),
        CheckName::RicciFlatness => ricci_flatness(ctx),
        CheckName::RiemannSymmetry => riemann_symmetry(ctx),
        CheckName::KahlerClosedness => kahler_closedness(ctx),
        CheckName::Quaternion => quaternion(ctx),
        CheckName::KillingMoment => killing_moment(ctx),
        CheckName::KillingCoframe => killing_coframe(ctx),
        CheckName::HarmonicCoordinates => harmonic_coordinates(ctx),
        CheckName::JetOracle => jet_oracle(ctx),
        CheckName::GaugeInvariance => gauge_invariance(ctx),
        CheckName::FluxQuantization => flux_quantization(ctx),
        CheckName::FluxAdditivity => flux_additivity_check(ctx),
        CheckName::Mass => mass_check(ctx),
        CheckName::MassFluxIdentity => mass_flux_identity(ctx),
        CheckName::FiberLength => fiber_length_check(ctx),
        CheckName::VolumeGrowth => volume_growth(ctx),
        CheckName::RiemDecay => decay(ctx, Quantity::RiemNorm),
        CheckName::MetricDeviationDecay => decay(ctx, Quantity::MetricDeviation),
        CheckName::FiberDefectDecay => decay(ctx, Quantity::FiberDefect),
        CheckName::NutBoundedness => nut_check(ctx),
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let m = result.map_err(|f| match f.point {
        Some(point) => SuiteError::AtPoint {
            check,
            point,
            source: f.source,
        },
        None => SuiteError::Check {
            check,
            source: f.source,
        },
    })?;
    let tolerance = ctx.manifest.tolerance(check);
    Ok((
        CheckRecord {
            name: check,
            value: m.value,
            tolerance,
            passed: m.value <= tolerance,
            samples: m.samples,
            wall_time_ms: ctx.manifest.record_timings.then_some(elapsed),
            worst_point: m.worst_point,
            details: m.details,
        },
        elapsed,
    ))
}

/// A finished run: the report and the wall time of each check in
/// milliseconds (kept out of the report unless the manifest asks).
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub timings: Vec<f64>,
}

/// Runs the selected checks concurrently and assembles the report in
/// selection order.
pub fn run_suite(manifest: &RunManifest) -> Result<RunOutcome, SuiteError> {
    let ctx = Context::new(manifest)?;
    let checks = manifest.checks();
    let results: Vec<_> = checks.par_iter().map(|c| run_check(&ctx, *c)).collect();
    let mut records = Vec::with_capacity(results.len());
    let mut timings = Vec::with_capacity(results.len());
    for r in results {
        let (record, t) = r?;
        records.push(record);
        timings.push(t);
    }
    let provenance = Provenance {
        manifest_sha256: manifest.digest(),
        artifact: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: manifest.seed,
    };
    Ok(RunOutcome {
        report: VerificationReport::new(manifest.config.clone(), records, provenance),
        timings,
    })
}
