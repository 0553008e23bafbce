//! Monopole connection `eta = dt + sum_i A_i` with `d eta = *dV`.
//!
//! Each center carries a Dirac potential in one of two gauge charts, written
//! in spherical coordinates `(r, theta, phi)` about the center:
//!
//! * [`Chart::North`]: `A = 2m (cos theta - 1) dphi`, singular on the ray
//!   `a - s e3` (`s > 0`), vanishing on the `+e3` axis;
//! * [`Chart::South`]: `A = 2m (cos theta + 1) dphi`, singular on `a + s e3`.
//!
//! The charts differ by `4m dphi`; going once around the string this is the
//! fibre shift `8 pi m`, exactly one period of `t`. The connection is
//! normalized by `eta(d/dt) = 1` throughout.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::config::InstantonConfig;
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::potential::{eval_omega, TwoForm3};

/// Minimum angular distance (radians) between an evaluation point and the
/// Dirac string of any center.
pub const DEFAULT_STRING_GUARD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    /// String along `-e3`; regular near `theta = 0`.
    North,
    /// String along `+e3`; regular near `theta = pi`.
    South,
}

impl Chart {
    pub fn opposite(self) -> Chart {
        match self {
            Chart::North => Chart::South,
            Chart::South => Chart::North,
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::North => "N",
            Chart::South => "S",
        })
    }
}

/// One chart per center.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaugeChart {
    charts: Vec<Chart>,
}

impl GaugeChart {
    pub fn new(charts: Vec<Chart>) -> Self {
        GaugeChart { charts }
    }

    pub fn uniform(k: usize, chart: Chart) -> Self {
        GaugeChart {
            charts: alloc::vec![chart; k],
        }
    }

    /// North for center `i` iff `(x - a_i)_3 >= 0`, keeping every string at
    /// least a right angle away from `x`.
    pub fn automatic(config: &InstantonConfig, x: [f64; 3]) -> Self {
        GaugeChart {
            charts: config
                .centers()
                .iter()
                .map(|a| {
                    if x[2] - a[2] >= 0.0 {
                        Chart::North
                    } else {
                        Chart::South
                    }
                })
                .collect(),
        }
    }

    /// Pseudo-random chart per center, picked from `(seed, salt, i)`, wherever
    /// both charts keep `x` at least `min_angle` from their strings; the
    /// automatic chart elsewhere.
    pub fn mixed(
        config: &InstantonConfig,
        x: [f64; 3],
        seed: u64,
        salt: u64,
        min_angle: f64,
    ) -> Self {
        let auto = Self::automatic(config, x);
        GaugeChart {
            charts: config
                .centers()
                .iter()
                .zip(auto.charts)
                .enumerate()
                .map(|(i, (a, chart))| {
                    let other = chart.opposite();
                    let flip = splitmix64(seed ^ splitmix64(salt ^ splitmix64(i as u64))) & 1 == 1;
                    if flip && string_angle(*a, other, x) >= min_angle {
                        other
                    } else {
                        chart
                    }
                })
                .collect(),
        }
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }

    /// Checks chart count, exclusion balls and string proximity at `x`.
    pub fn check_admissible(&self, config: &InstantonConfig, x: [f64; 3]) -> Result<()> {
        if self.charts.len() != config.k() {
            return Err(Error::GaugeLength {
                got: self.charts.len(),
                expected: config.k(),
            });
        }
        config.check_admissible(x)?;
        for (i, (a, chart)) in config.centers().iter().zip(&self.charts).enumerate() {
            let angle = string_angle(*a, *chart, x);
            if !(angle >= DEFAULT_STRING_GUARD) {
                return Err(Error::NearDiracString {
                    center: i,
                    point: x,
                    angle,
                    chart: *chart,
                    suggested: chart.opposite(),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Angle between `x - center` and the Dirac string of `chart`.
pub fn string_angle(center: [f64; 3], chart: Chart, x: [f64; 3]) -> f64 {
    let rel = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
    let rho = libm::hypot(rel[0], rel[1]);
    match chart {
        Chart::North => libm::atan2(rho, -rel[2]),
        Chart::South => libm::atan2(rho, rel[2]),
    }
}

/// A one-form in the chart coframe `(dx1, dx2, dx3, dt)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct OneForm4 {
    pub components: [f64; 4],
}

impl OneForm4 {
    pub fn max_abs_diff(&self, other: &OneForm4) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Spatial components of the Dirac potential of one center, as jets.
///
/// The `dt` component is zero. Errors when `x` is within
/// [`DEFAULT_STRING_GUARD`] of the string (reported against center 0; the
/// callers that know the index rewrite it).
pub fn dirac_potential(
    center: [f64; 3],
    mass: f64,
    chart: Chart,
    x: [f64; 3],
) -> Result<[Jet2; 3]> {
    let angle = string_angle(center, chart, x);
    if !(angle >= DEFAULT_STRING_GUARD) {
        return Err(Error::NearDiracString {
            center: 0,
            point: x,
            angle,
            chart,
            suggested: chart.opposite(),
        });
    }
    let p = Jet2::seed_point(x);
    let (rx, ry, rz) = (p[0] - center[0], p[1] - center[1], p[2] - center[2]);
    let rho2 = rx * rx + ry * ry;
    let r = (rho2 + rz * rz).checked_sqrt()?;
    // r(r + z) and r(r - z), avoiding cancellation on the far side of the axis
    let (denominator, sign) = match chart {
        Chart::North => {
            let s = if rz.value >= 0.0 {
                r + rz
            } else {
                rho2.checked_div(r - rz)?
            };
            (r * s, 1.0)
        }
        Chart::South => {
            let s = if rz.value <= 0.0 {
                r - rz
            } else {
                rho2.checked_div(r + rz)?
            };
            (r * s, -1.0)
        }
    };
    let factor = denominator.checked_recip()?.scale(2.0 * mass * sign);
    Ok([ry * factor, -(rx * factor), Jet2::ZERO])
}

/// The connection `eta = dt + A` at a point, with jets on its spatial part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionJet {
    pub spatial: [Jet2; 3],
}

impl ConnectionJet {
    pub fn one_form(&self) -> OneForm4 {
        OneForm4 {
            components: [
                self.spatial[0].value,
                self.spatial[1].value,
                self.spatial[2].value,
                1.0,
            ],
        }
    }

    /// `d eta` as a two-form on the base (components of `dA`).
    pub fn curvature(&self) -> TwoForm3 {
        let d = |comp: usize, axis: usize| self.spatial[comp].gradient[axis];
        TwoForm3 {
            c23: d(2, 1) - d(1, 2),
            c31: d(0, 2) - d(2, 0),
            c12: d(1, 0) - d(0, 1),
        }
    }

    /// Largest first derivative of the spatial components.
    pub fn derivative_scale(&self) -> f64 {
        self.spatial
            .iter()
            .flat_map(|j| j.gradient.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `eta` at `(x, t)` in the given gauge. Independent of `t`.
pub fn total_connection(
    config: &InstantonConfig,
    gauge: &GaugeChart,
    x: [f64; 3],
    _t: f64,
) -> Result<ConnectionJet> {
    gauge.check_admissible(config, x)?;
    let mut spatial = [Jet2::ZERO; 3];
    for (i, (a, chart)) in config.centers().iter().zip(gauge.charts()).enumerate() {
        let mass = config.center_mass(i) * config.connection_scale(i);
        let a_i = dirac_potential(*a, mass, *chart, x).map_err(|e| reindex(e, i))?;
        for d in 0..3 {
            spatial[d] += a_i[d];
        }
    }
    Ok(ConnectionJet { spatial })
}

fn reindex(e: Error, index: usize) -> Error {
    match e {
        Error::NearDiracString {
            point,
            angle,
            chart,
            suggested,
            ..
        } => Error::NearDiracString {
            center: index,
            point,
            angle,
            chart,
            suggested,
        },
        other => other,
    }
}

/// Relative max-norm of `d eta - *dV` at `x`; the scale is the largest of
/// `|Omega|` and the first derivatives of `A`.
pub fn verify_curvature(config: &InstantonConfig, gauge: &GaugeChart, x: [f64; 3]) -> Result<f64> {
    let eta = total_connection(config, gauge, x, 0.0)?;
    let omega = eval_omega(config, x)?;
    let diff = (eta.curvature() - omega).max_abs();
    if diff == 0.0 {
        return Ok(0.0);
    }
    let scale = omega.max_abs().max(eta.derivative_scale());
    Ok(diff / scale)
}

/// Chart transition data for one center at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionReport {
    /// `(A_S - A_N)(d/dphi)`.
    pub phi_component: f64,
    /// `4 m_i`.
    pub expected: f64,
    /// Max-norm of `(A_S - A_N) - 4 m_i dphi`, relative to `|4 m_i dphi|`.
    pub residual: f64,
    /// Fibre shift accumulated by one loop of the transition, `2 pi phi_component`.
    pub loop_shift: f64,
    /// Fibre period `L = 8 pi m`.
    pub period: f64,
    /// `loop_shift / period`; must be an integer for a well-defined bundle.
    pub winding: f64,
}

impl TransitionReport {
    pub fn consistent(&self, tol: f64) -> bool {
        let w = self.winding;
        (w - libm::round(w)).abs() <= tol && libm::round(w) != 0.0
    }
}

pub fn transition_consistency(
    config: &InstantonConfig,
    center: usize,
    x: [f64; 3],
) -> Result<TransitionReport> {
    let a = *config.centers().get(center).ok_or(Error::CenterIndex {
        index: center,
        count: config.k(),
    })?;
    config.check_admissible(x)?;
    let mass = config.center_mass(center) * config.connection_scale(center);
    let north = dirac_potential(a, mass, Chart::North, x).map_err(|e| reindex(e, center))?;
    let south = dirac_potential(a, mass, Chart::South, x).map_err(|e| reindex(e, center))?;
    let (rx, ry) = (x[0] - a[0], x[1] - a[1]);
    let rho2 = rx * rx + ry * ry;
    let expected = 4.0 * config.center_mass(center);
    let dphi = [-ry / rho2, rx / rho2, 0.0];
    let diff: [f64; 3] = core::array::from_fn(|d| south[d].value - north[d].value);
    let phi_component = diff[0] * -ry + diff[1] * rx + diff[2] * 0.0;
    let mut residual: f64 = 0.0;
    for d in 0..3 {
        residual = residual.max((diff[d] - expected * dphi[d]).abs());
    }
    let dphi_norm = libm::sqrt(dphi[0] * dphi[0] + dphi[1] * dphi[1]);
    let loop_shift = 2.0 * PI * phi_component;
    let period = config.fiber_period();
    Ok(TransitionReport {
        phi_component,
        expected,
        residual: residual / (expected * dphi_norm),
        loop_shift,
        period,
        winding: loop_shift / period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn north_chart_vanishes_on_upper_axis() {
        let a = dirac_potential([0.0; 3], 0.5, Chart::North, [0.0, 0.0, 2.0]).unwrap();
        for c in &a {
            assert_eq!(c.value, 0.0);
        }
        let a = dirac_potential([0.0; 3], 0.5, Chart::South, [0.0, 0.0, -2.0]).unwrap();
        for c in &a {
            assert_eq!(c.value, 0.0);
        }
    }

    #[test]
    fn equator_values() {
        // at (1,0,0): dphi = dy, so A_N = -2m dy and A_S = +2m dy
        let m = 0.75;
        let x = [1.0, 0.0, 0.0];
        let n = dirac_potential([0.0; 3], m, Chart::North, x).unwrap();
        let s = dirac_potential([0.0; 3], m, Chart::South, x).unwrap();
        assert!((n[1].value + 2.0 * m).abs() < 1e-15);
        assert!((s[1].value - 2.0 * m).abs() < 1e-15);
        assert_eq!(n[0].value, 0.0);
        assert_eq!(n[2].value, 0.0);
    }

    #[test]
    fn string_proximity_is_reported() {
        let c = InstantonConfig::new(0.5, vec![[0.0; 3], [3.0, 0.0, 0.0]]).unwrap();
        let gauge = GaugeChart::uniform(2, Chart::North);
        let err = total_connection(&c, &gauge, [3.0, 0.0, -1.0], 0.0).unwrap_err();
        match err {
            Error::NearDiracString {
                center, suggested, ..
            } => {
                assert_eq!(center, 1);
                assert_eq!(suggested, Chart::South);
            }
            other => panic!("{other:?}"),
        }
        let gauge = GaugeChart::uniform(1, Chart::North);
        assert!(matches!(
            total_connection(&c, &gauge, [1.0, 1.0, 1.0], 0.0),
            Err(Error::GaugeLength {
                got: 1,
                expected: 2
            })
        ));
    }

    #[test]
    fn flat_connection_is_dt() {
        let c = InstantonConfig::flat(1.0).unwrap();
        let eta = total_connection(&c, &GaugeChart::new(vec![]), [1.0, 2.0, 3.0], 0.3).unwrap();
        assert_eq!(eta.one_form().components, [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(
            verify_curvature(&c, &GaugeChart::new(vec![]), [1.0, 2.0, 3.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn curvature_of_single_monopole() {
        let c = InstantonConfig::taub_nut(0.5).unwrap();
        let x = [1.0, 0.0, 0.0];
        let eta = total_connection(&c, &GaugeChart::uniform(1, Chart::North), x, 0.0).unwrap();
        let omega = eval_omega(&c, x).unwrap();
        assert!((eta.curvature() - omega).max_abs() <= 1e-10);
        assert!((eta.curvature().c23 + 1.0).abs() <= 1e-10);
    }

    #[test]
    fn far_field_potential_bounded() {
        let m = 0.5;
        for &(x, chart) in &[
            ([1000.0, 0.0, 1.0], Chart::North),
            ([0.0, -700.0, -700.0], Chart::South),
            ([1.0, 1.0, -1000.0], Chart::South),
        ] {
            let a = dirac_potential([0.0; 3], m, chart, x).unwrap();
            // A(d/dphi) = 2m (cos theta -+ 1) is bounded by 4m
            let along_phi = a[0].value * -x[1] + a[1].value * x[0];
            assert!(along_phi.abs() <= 4.0 * m + 1e-12);
        }
    }

    #[test]
    fn transition_on_equator() {
        let c = InstantonConfig::new(0.5, vec![[1.0, 1.0, 0.0]]).unwrap();
        let report = transition_consistency(&c, 0, [3.0, 1.0, 0.0]).unwrap();
        assert!((report.phi_component - 2.0).abs() < 1e-14);
        assert!(report.residual < 1e-14);
        assert!((report.loop_shift - 4.0 * PI).abs() < 1e-13);
        assert!(report.consistent(1e-12));

        let c2 = InstantonConfig::new(1.0, vec![[1.0, 1.0, 0.0]]).unwrap();
        let r2 = transition_consistency(&c2, 0, [3.0, 1.0, 0.0]).unwrap();
        assert!((r2.loop_shift - 2.0 * report.loop_shift).abs() < 1e-12);
        assert!((r2.period - 2.0 * report.period).abs() < 1e-12);
        assert!(r2.consistent(1e-12));
    }

    #[test]
    fn unequal_mass_transition_is_inconsistent() {
        let c = InstantonConfig::unequal_masses_debug(
            0.5,
            vec![[0.0; 3], [4.0, 0.0, 0.0]],
            vec![0.5, 0.8],
        )
        .unwrap();
        assert!(transition_consistency(&c, 0, [1.0, 0.5, 0.2])
            .unwrap()
            .consistent(1e-9));
        assert!(!transition_consistency(&c, 1, [5.0, 0.5, 0.2])
            .unwrap()
            .consistent(1e-9));
    }
}
