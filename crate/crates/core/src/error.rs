use alloc::boxed::Box;

use thiserror::Error;

use crate::config::ConfigError;
use crate::connection::Chart;
use crate::jet::JetError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),

    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),

    #[error("point {point:?} is {distance:e} from center {center}, inside the exclusion radius")]
    InsideExclusion {
        center: usize,
        point: [f64; 3],
        distance: f64,
    },

    #[error(
        "point {point:?} is {angle:e} rad from the Dirac string of center {center} in chart {chart}; use chart {suggested}"
    )]
    NearDiracString {
        center: usize,
        point: [f64; 3],
        angle: f64,
        chart: Chart,
        suggested: Chart,
    },

    #[error("gauge assigns {got} charts for {expected} centers")]
    GaugeLength { got: usize, expected: usize },

    #[error("center index {index} out of range ({count} centers)")]
    CenterIndex { index: usize, count: usize },

    #[error("quadrature node {index} at {point:?}: {source}")]
    QuadratureNode {
        index: usize,
        point: [f64; 3],
        source: Box<Error>,
    },

    #[error("sphere of radius {radius} passes within the exclusion radius of center {center}")]
    SphereHitsExclusion { center: usize, radius: f64 },

    #[error("radius schedule has {len} entries, at least {min} required")]
    ScheduleTooShort { len: usize, min: usize },

    #[error("radius {radius} is below the admissible minimum {min}")]
    RadiusTooSmall { radius: f64, min: f64 },

    #[error("degenerate samples: {0}")]
    DegenerateSamples(&'static str),

    #[error("metric is not invertible")]
    SingularMetric,
}
