//! Global quantities: flux and Chern numbers, the boundary-integral mass,
//! fibre lengths and the volume of tubes `pi^-1(B_R)`.
//!
//! Every integrand is invariant along the fibre, so integrals over
//! `pi^-1(S)` are `L` times a sphere integral. The mass routine checks this
//! by evaluating its integrand at two fibre angles.
//!
//! Convention for the mass: `div_h g` is the negative divergence
//! `-(h^{mu lambda} nabla_mu g_{lambda nu})`. With the opposite sign the
//! boundary integral of a multi-Taub-NUT metric tends to `7/3 sum m_i`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::config::{distance, InstantonConfig};
use crate::connection::{total_connection, GaugeChart};
use crate::error::{Error, Result};
use crate::geometry::{
    christoffel, christoffel_values, inverse_metric_jet, ChartPoint, GhFields, MetricJet,
};
use crate::jet::Jet2;
use crate::linalg::Mat4;
use crate::potential::eval_v;
use crate::quadrature::{
    gauss_legendre, integrate_sphere_with, pairwise_sum, richardson, Evaluator, Sequential,
    SphereQuadrature,
};

/// How charts are assigned at quadrature nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GaugePolicy {
    /// [`GaugeChart::automatic`].
    Automatic,
    /// [`GaugeChart::mixed`] with the node index as salt.
    Mixed { seed: u64, min_angle: f64 },
}

impl GaugePolicy {
    pub fn chart(&self, config: &InstantonConfig, x: [f64; 3], salt: u64) -> GaugeChart {
        match *self {
            GaugePolicy::Automatic => GaugeChart::automatic(config, x),
            GaugePolicy::Mixed { seed, min_angle } => {
                GaugeChart::mixed(config, x, seed, salt, min_angle)
            }
        }
    }
}

/// Quadrature settings shared by the sphere integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralOptions {
    pub n_theta: usize,
    pub n_phi: usize,
    pub gauge: GaugePolicy,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions {
            n_theta: SphereQuadrature::DEFAULT_N_THETA,
            n_phi: SphereQuadrature::DEFAULT_N_PHI,
            gauge: GaugePolicy::Automatic,
        }
    }
}

impl IntegralOptions {
    fn sphere(&self, center: [f64; 3], radius: f64) -> SphereQuadrature {
        SphereQuadrature::new(center, radius).with_degree(self.n_theta, self.n_phi)
    }
}

fn check_sphere(config: &InstantonConfig, center: [f64; 3], radius: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::RadiusTooSmall { radius, min: 0.0 });
    }
    for (i, a) in config.centers().iter().enumerate() {
        if (distance(*a, center) - radius).abs() < config.exclusion_radius() {
            return Err(Error::SphereHitsExclusion { center: i, radius });
        }
    }
    Ok(())
}

/// `int_S d eta` over the sphere `S(center, radius)` with outward normal.
///
/// The integrand is the curvature of the connection itself, so a connection
/// that does not satisfy `d eta = *dV` shows up here.
pub fn flux(config: &InstantonConfig, center: [f64; 3], radius: f64) -> Result<f64> {
    flux_with(
        config,
        center,
        radius,
        &IntegralOptions::default(),
        &Sequential,
    )
}

pub fn flux_with<E: Evaluator + ?Sized>(
    config: &InstantonConfig,
    center: [f64; 3],
    radius: f64,
    opts: &IntegralOptions,
    eval: &E,
) -> Result<f64> {
    check_sphere(config, center, radius)?;
    let q = opts.sphere(center, radius);
    integrate_sphere_with(&q, eval, |i, node| {
        let gauge = opts.gauge.chart(config, node.point, i as u64);
        let eta = total_connection(config, &gauge, node.point, 0.0)?;
        Ok(eta.curvature().flux_density(node.normal))
    })
}

/// `flux / L`; an integer for every admissible sphere.
pub fn chern(config: &InstantonConfig, center: [f64; 3], radius: f64) -> Result<f64> {
    Ok(flux(config, center, radius)? / config.fiber_period())
}

/// Fluxes through one large sphere and through small disjoint spheres around
/// every center.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxAdditivity {
    pub large: f64,
    pub small: Vec<f64>,
    /// `|large - sum small|` relative to `max(|large|, 1)`.
    pub residual: f64,
}

/// Compares the flux through `S(centroid, large_radius)` with the sum over
/// spheres of radius `small_radius` around the centers.
pub fn flux_additivity<E: Evaluator + ?Sized>(
    config: &InstantonConfig,
    large_radius: f64,
    small_radius: f64,
    opts: &IntegralOptions,
    eval: &E,
) -> Result<FluxAdditivity> {
    let large = flux_with(config, config.centroid(), large_radius, opts, eval)?;
    let small = config
        .centers()
        .iter()
        .map(|a| flux_with(config, *a, small_radius, opts, eval))
        .collect::<Result<Vec<f64>>>()?;
    let total = pairwise_sum(&small);
    Ok(FluxAdditivity {
        large,
        residual: (large - total).abs() / large.abs().max(1.0),
        small,
    })
}

/// Default radius for spheres around a single center: a quarter of the
/// smallest separation, capped by the length scale.
pub fn small_sphere_radius(config: &InstantonConfig) -> f64 {
    let sep = config.min_separation();
    let cap = 0.25 * config.length_scale();
    if sep.is_finite() {
        (0.25 * sep).min(cap)
    } else {
        cap
    }
}

/// `h = dx^2 + eta^2` with jets.
pub fn model_metric(fields: &GhFields) -> MetricJet {
    let mut h = [[Jet2::ZERO; 4]; 4];
    for i in 0..3 {
        for j in i..3 {
            let mut hij = fields.a[i] * fields.a[j];
            if i == j {
                hij += Jet2::constant(1.0);
            }
            h[i][j] = hij;
            h[j][i] = hij;
        }
        h[i][3] = fields.a[i];
        h[3][i] = fields.a[i];
    }
    h[3][3] = Jet2::constant(1.0);
    h
}

/// `h^ij = delta`, `h^it = -A_i`, `h^tt = 1 + |A|^2`.
pub fn model_inverse(a: [f64; 3]) -> Mat4 {
    let mut inv = [[0.0; 4]; 4];
    for i in 0..3 {
        inv[i][i] = 1.0;
        inv[i][3] = -a[i];
        inv[3][i] = -a[i];
    }
    inv[3][3] = 1.0 + a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    inv
}

/// The one-form `beta = div_h g + d tr_h g - 1/2 d g(W, W)` at a point, in
/// chart components `(x1, x2, x3, t)`.
pub fn mass_one_form(config: &InstantonConfig, p: &ChartPoint) -> Result<[f64; 4]> {
    let fields = GhFields::at(config, p)?;
    let g = fields.metric()?;
    let h = model_metric(&fields);
    let h_inv = model_inverse(fields.a_values());
    let h_inv_jet = inverse_metric_jet(&h, &h_inv);
    let gamma = christoffel_values(&christoffel(&h, &h_inv));
    let dg = |k: usize, i: usize, j: usize| if k < 3 { g[i][j].gradient[k] } else { 0.0 };

    let mut beta = [0.0; 4];
    for (nu, b) in beta.iter_mut().enumerate() {
        let mut div = 0.0;
        for mu in 0..4 {
            for lam in 0..4 {
                let mut cov = dg(mu, lam, nu);
                for rho in 0..4 {
                    cov -= gamma[rho][mu][lam] * g[rho][nu].value
                        + gamma[rho][mu][nu] * g[lam][rho].value;
                }
                div += h_inv[mu][lam] * cov;
            }
        }
        let mut dtr = 0.0;
        let mut dnorm = 0.0;
        if nu < 3 {
            for a in 0..4 {
                for c in 0..4 {
                    dtr += h_inv_jet[a][c].gradient[nu] * g[a][c].value
                        + h_inv[a][c] * g[a][c].gradient[nu];
                }
            }
            dnorm = g[3][3].gradient[nu];
        }
        *b = -div + dtr - 0.5 * dnorm;
    }
    Ok(beta)
}

/// Surface density of `*_h beta` on `pi^-1(S)` per unit area and unit fibre
/// length: `h^{i lambda} beta_lambda n_i` (`det h = 1`).
pub fn mass_density(config: &InstantonConfig, p: &ChartPoint, normal: [f64; 3]) -> Result<f64> {
    let beta = mass_one_form(config, p)?;
    let h_inv = model_inverse(GhFields::at(config, p)?.a_values());
    let mut s = 0.0;
    for i in 0..3 {
        let raised: f64 = (0..4).map(|l| h_inv[i][l] * beta[l]).sum();
        s += raised * normal[i];
    }
    Ok(s)
}

/// Per-radius mass estimates and their extrapolation.
#[derive(Clone, Debug, PartialEq)]
pub struct MassReport {
    pub radii: Vec<f64>,
    pub estimates: Vec<f64>,
    pub extrapolated: f64,
    /// Largest change of the integrand between two fibre angles.
    pub fiber_defect: f64,
    /// Ratios of successive differences of the estimates; about 2 for an
    /// `R^-1` error on a doubling schedule. `None` when a difference is zero.
    pub difference_ratios: Vec<Option<f64>>,
}

/// Mass estimate on one sphere around the centroid:
/// `-(1/12 pi L) int_{pi^-1(S_R)} *_h beta`. Returns the estimate and the
/// fibre-invariance defect.
pub fn mass_at_radius<E: Evaluator + ?Sized>(
    config: &InstantonConfig,
    radius: f64,
    opts: &IntegralOptions,
    eval: &E,
) -> Result<(f64, f64)> {
    let c = config.centroid();
    let min = config
        .centers()
        .iter()
        .map(|a| distance(*a, c))
        .fold(0.0, f64::max)
        + 1.0;
    if !(radius > min) {
        return Err(Error::RadiusTooSmall { radius, min });
    }
    let q = opts.sphere(c, radius);
    let nodes = q.nodes();
    let t_alt = 0.375 * config.fiber_period();
    let defects = eval.evaluate(nodes.len(), &|i| {
        let node = &nodes[i];
        let gauge = opts.gauge.chart(config, node.point, i as u64);
        let a = mass_density(
            config,
            &ChartPoint::new(node.point, 0.0, gauge.clone()),
            node.normal,
        );
        let b = mass_density(
            config,
            &ChartPoint::new(node.point, t_alt, gauge),
            node.normal,
        );
        match (a, b) {
            (Ok(a), Ok(b)) => Ok((a - b).abs()),
            (Err(e), _) | (_, Err(e)) => Err(crate::quadrature::node_error(i, node, e)),
        }
    })?;
    let fiber_defect = defects.iter().fold(0.0, |m: f64, v| m.max(*v));
    let integral = integrate_sphere_with(&q, eval, |i, node| {
        let gauge = opts.gauge.chart(config, node.point, i as u64);
        mass_density(
            config,
            &ChartPoint::new(node.point, 0.0, gauge),
            node.normal,
        )
    })?;
    Ok((-integral / (12.0 * PI), fiber_defect))
}

/// Mass estimates over `radii` (at least three) and their Richardson limit.
pub fn mass<E: Evaluator + ?Sized>(
    config: &InstantonConfig,
    radii: &[f64],
    opts: &IntegralOptions,
    eval: &E,
) -> Result<MassReport> {
    if radii.len() < 3 {
        return Err(Error::ScheduleTooShort {
            len: radii.len(),
            min: 3,
        });
    }
    let mut estimates = Vec::with_capacity(radii.len());
    let mut fiber_defect: f64 = 0.0;
    for r in radii {
        let (m, d) = mass_at_radius(config, *r, opts, eval)?;
        estimates.push(m);
        fiber_defect = fiber_defect.max(d);
    }
    let extrapolated = richardson(radii, &estimates)?;
    let difference_ratios = estimates
        .windows(3)
        .map(|w| {
            let (d0, d1) = (w[0] - w[1], w[1] - w[2]);
            if d1 == 0.0 {
                None
            } else {
                Some(d0 / d1)
            }
        })
        .collect();
    Ok(MassReport {
        radii: radii.to_vec(),
        estimates,
        extrapolated,
        fiber_defect,
        difference_ratios,
    })
}

/// `(8, 16, 32, 64)` times the configuration length scale.
pub fn default_mass_radii(config: &InstantonConfig) -> Vec<f64> {
    let l = config.length_scale();
    [8.0, 16.0, 32.0, 64.0].iter().map(|f| f * l).collect()
}

/// Length of the fibre over `x`: `L V^-1/2`.
pub fn fiber_length(config: &InstantonConfig, x: [f64; 3]) -> Result<f64> {
    let v = eval_v(config, x)?.value;
    Ok(config.fiber_period() / libm::sqrt(v))
}

/// Quadrature degrees for [`tube_volume`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeOptions {
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_radial: usize,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        VolumeOptions {
            n_theta: 48,
            n_phi: 96,
            n_radial: 4,
        }
    }
}

/// `vol(pi^-1(B_R)) = L int_{B_R} V dx` for the ball around the centroid.
///
/// The constant part of `V` integrates to `4 pi R^3 / 3`. Each term
/// `2 m_i / |x - a_i|` is integrated in polar coordinates around `a_i`, where
/// the Jacobian `rho^2` absorbs the singularity: directions by the sphere
/// rule, radii by Gauss-Legendre on `[0, rho_max(direction)]`.
pub fn tube_volume(config: &InstantonConfig, radius: f64, opts: &VolumeOptions) -> Result<f64> {
    let c = config.centroid();
    let mut singular = Vec::with_capacity(config.k());
    for (i, a) in config.centers().iter().enumerate() {
        let rel = [a[0] - c[0], a[1] - c[1], a[2] - c[2]];
        let d = distance(*a, c);
        let min = d + config.exclusion_radius();
        if !(radius > min) {
            return Err(Error::RadiusTooSmall { radius, min });
        }
        singular.push(2.0 * config.center_mass(i) * inverse_distance_integral(rel, radius, opts));
    }
    let ball = 4.0 * PI * radius * radius * radius / 3.0;
    Ok(config.fiber_period() * (ball + pairwise_sum(&singular)))
}

/// `int_{B_R(0)} 1/|x - a| dx` for `|a| < R`, by polar quadrature about `a`.
fn inverse_distance_integral(a: [f64; 3], radius: f64, opts: &VolumeOptions) -> f64 {
    let dirs = SphereQuadrature::new([0.0; 3], 1.0)
        .with_degree(opts.n_theta, opts.n_phi)
        .nodes();
    let (u, w) = gauss_legendre(opts.n_radial);
    let a2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    let terms: Vec<f64> = dirs
        .iter()
        .map(|d| {
            let ad = a[0] * d.normal[0] + a[1] * d.normal[1] + a[2] * d.normal[2];
            let rho_max = -ad + libm::sqrt(ad * ad + radius * radius - a2);
            // int_0^rho_max rho^2 (1/rho) d rho on Gauss nodes
            let half = 0.5 * rho_max;
            let radial: f64 = u
                .iter()
                .zip(&w)
                .map(|(s, ws)| ws * half * (half * (s + 1.0)))
                .sum();
            d.weight * radial
        })
        .collect();
    pairwise_sum(&terms)
}

/// Closed form `L (4 pi R^3/3 + sum 2 m_i 2 pi (R^2 - d_i^2/3))`, `d_i` the
/// distance of `a_i` from the centroid.
pub fn tube_volume_closed_form(config: &InstantonConfig, radius: f64) -> f64 {
    let c = config.centroid();
    let ball = 4.0 * PI * radius * radius * radius / 3.0;
    let singular: f64 = config
        .centers()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let d = distance(*a, c);
            2.0 * config.center_mass(i) * 2.0 * PI * (radius * radius - d * d / 3.0)
        })
        .sum();
    config.fiber_period() * (ball + singular)
}
