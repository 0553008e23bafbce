//! Radius/value tables for offline plotting.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use taubnut_core::asymptotics::{decay_samples, Quantity};
use taubnut_core::integrals::{fiber_length, mass_at_radius, tube_volume, VolumeOptions};

use crate::manifest::RunManifest;
use crate::parallel::Rayon;
use crate::suite::{Context, SuiteError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotQuantity {
    /// Sup of `|Riem|` on spheres around the centroid.
    RiemDecay,
    /// Sup of `|g - h|_h` on the same spheres.
    MetricDeviation,
    /// Boundary mass estimate per radius.
    MassConvergence,
    /// `1 - L(x) / L` along the `x3` ray from the centroid.
    FiberLength,
    /// `vol(R) / ((4 pi / 3) L R^3) - 1`.
    VolumeGrowth,
}

impl PlotQuantity {
    pub const ALL: [PlotQuantity; 5] = [
        PlotQuantity::RiemDecay,
        PlotQuantity::MetricDeviation,
        PlotQuantity::MassConvergence,
        PlotQuantity::FiberLength,
        PlotQuantity::VolumeGrowth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PlotQuantity::RiemDecay => "riem_decay",
            PlotQuantity::MetricDeviation => "metric_deviation",
            PlotQuantity::MassConvergence => "mass_convergence",
            PlotQuantity::FiberLength => "fiber_length",
            PlotQuantity::VolumeGrowth => "volume_growth",
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown plot quantity {0:?}; expected one of riem_decay, metric_deviation, mass_convergence, fiber_length, volume_growth")]
pub struct UnknownQuantity(String);

impl FromStr for PlotQuantity {
    type Err = UnknownQuantity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlotQuantity::ALL
            .into_iter()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| UnknownQuantity(s.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error(transparent)]
    Core(#[from] taubnut_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// The `(radius, value)` rows for `quantity`.
pub fn plot_rows(
    manifest: &RunManifest,
    quantity: PlotQuantity,
) -> Result<Vec<(f64, f64)>, PlotError> {
    let ctx = Context::new(manifest)?;
    let c = &ctx.config;
    let sampler = taubnut_core::asymptotics::SphereSampler::from_seed(
        manifest.samples.sphere_nodes,
        manifest.seed,
    );
    let rows = match quantity {
        PlotQuantity::RiemDecay | PlotQuantity::MetricDeviation => {
            let q = if quantity == PlotQuantity::RiemDecay {
                Quantity::RiemNorm
            } else {
                Quantity::MetricDeviation
            };
            decay_samples(c, q, &ctx.decay_radii(), &sampler, &Rayon)?
                .into_iter()
                .map(|s| (s.radius, s.value))
                .collect()
        }
        PlotQuantity::MassConvergence => {
            let opts = taubnut_core::integrals::IntegralOptions {
                n_theta: manifest.samples.n_theta,
                n_phi: manifest.samples.n_phi,
                ..Default::default()
            };
            ctx.mass_radii()
                .into_iter()
                .map(|r| Ok((r, mass_at_radius(c, r, &opts, &Rayon)?.0)))
                .collect::<Result<_, taubnut_core::Error>>()?
        }
        PlotQuantity::FiberLength => {
            let o = c.centroid();
            ctx.decay_radii()
                .into_iter()
                .map(|r| {
                    Ok((
                        r,
                        1.0 - fiber_length(c, [o[0], o[1], o[2] + r])? / c.fiber_period(),
                    ))
                })
                .collect::<Result<_, taubnut_core::Error>>()?
        }
        PlotQuantity::VolumeGrowth => {
            let model = 4.0 * PI / 3.0 * c.fiber_period();
            let base = ctx.volume_radius() / 8.0;
            (0..5)
                .map(|j| {
                    let r = base * f64::from(1 << j);
                    Ok((
                        r,
                        tube_volume(c, r, &VolumeOptions::default())? / (model * r * r * r) - 1.0,
                    ))
                })
                .collect::<Result<_, taubnut_core::Error>>()?
        }
    };
    Ok(rows)
}

/// Comma-separated text with a `radius,value` header. Values are written
/// with the shortest representation that round-trips.
pub fn format_rows(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("radius,value\n");
    for (r, v) in rows {
        let _ = writeln!(out, "{r:?},{v:?}");
    }
    out
}

pub fn emit_plot_data(
    manifest: &RunManifest,
    quantity: PlotQuantity,
    path: &Path,
) -> Result<Vec<(f64, f64)>, PlotError> {
    let rows = plot_rows(manifest, quantity)?;
    std::fs::write(path, format_rows(&rows)).map_err(|source| PlotError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(rows)
}
