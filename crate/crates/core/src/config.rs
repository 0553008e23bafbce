//! Instanton configuration: mass parameter and NUT centers.

use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConfigError {
    #[error("mass parameter must be positive and finite, got {0}")]
    NonPositiveMass(f64),
    #[error("exclusion radius must be positive and finite, got {0}")]
    NonPositiveExclusion(f64),
    #[error("center {0} has a non-finite coordinate")]
    NonFiniteCenter(usize),
    #[error("centers {i} and {j} are {distance:e} apart, not more than twice the exclusion radius {epsilon:e}")]
    CentersTooClose {
        i: usize,
        j: usize,
        distance: f64,
        epsilon: f64,
    },
    #[error("{masses} per-center masses given for {centers} centers")]
    MassCount { masses: usize, centers: usize },
    #[error("connection perturbation targets center {index} of {count}")]
    PerturbationIndex { index: usize, count: usize },
}

/// Deliberate departures from a valid multi-Taub-NUT configuration, used only
/// as negative controls.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DebugPerturbation {
    /// Per-center mass parameters replacing the common `m`.
    pub masses: Option<Vec<f64>>,
    /// Scale the Dirac potential of one center by a factor, breaking
    /// `d eta = *dV`.
    pub connection_scale: Option<(usize, f64)>,
}

/// Mass parameter `m` and NUT centers `a_i`; determines the metric
/// `g = V dx^2 + eta^2 / V` with `V = 1 + sum 2m/|x - a_i|`.
///
/// The fibre coordinate ranges over `[0, 8 pi m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InstantonConfig {
    mass: f64,
    centers: Vec<[f64; 3]>,
    epsilon: f64,
    debug: Option<DebugPerturbation>,
}

pub(crate) fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    libm::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    libm::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
}

fn diameter_of(centers: &[[f64; 3]]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in centers.iter().enumerate() {
        for b in &centers[i + 1..] {
            d = d.max(distance(*a, *b));
        }
    }
    d
}

impl InstantonConfig {
    /// Validated configuration with the default exclusion radius
    /// `1e-3 (diameter + 1)`.
    pub fn new(mass: f64, centers: Vec<[f64; 3]>) -> Result<Self> {
        let epsilon = 1e-3 * (diameter_of(&centers) + 1.0);
        Self::with_exclusion_radius(mass, centers, epsilon)
    }

    pub fn with_exclusion_radius(mass: f64, centers: Vec<[f64; 3]>, epsilon: f64) -> Result<Self> {
        let config = InstantonConfig {
            mass,
            centers,
            epsilon,
            debug: None,
        };
        config.validate()?;
        Ok(config)
    }

    /// Flat `R^3 x S^1` with circle length `8 pi m`.
    pub fn flat(mass: f64) -> Result<Self> {
        Self::new(mass, Vec::new())
    }

    /// Single-center Taub-NUT with its NUT at the origin.
    pub fn taub_nut(mass: f64) -> Result<Self> {
        Self::new(mass, alloc::vec![[0.0; 3]])
    }

    /// Negative control: distinct masses per center. The potential and the
    /// connection are built with these masses while the fibre period stays
    /// `8 pi m`, so the circle bundle has non-integral Chern numbers.
    #[doc(hidden)]
    pub fn unequal_masses_debug(
        mass: f64,
        centers: Vec<[f64; 3]>,
        masses: Vec<f64>,
    ) -> Result<Self> {
        let mut config = Self::new(mass, centers)?;
        config.debug = Some(DebugPerturbation {
            masses: Some(masses),
            connection_scale: None,
        });
        config.validate()?;
        Ok(config)
    }

    /// Negative control: scale the Dirac potential of `center` by `factor`.
    #[doc(hidden)]
    pub fn with_perturbed_connection(mut self, center: usize, factor: f64) -> Result<Self> {
        let mut debug = self.debug.take().unwrap_or_default();
        debug.connection_scale = Some((center, factor));
        self.debug = Some(debug);
        self.validate()?;
        Ok(self)
    }

    #[doc(hidden)]
    pub fn with_debug(mut self, debug: DebugPerturbation) -> Result<Self> {
        self.debug = Some(debug);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(ConfigError::NonPositiveMass(self.mass).into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(ConfigError::NonPositiveExclusion(self.epsilon).into());
        }
        for (i, c) in self.centers.iter().enumerate() {
            if !c.iter().all(|v| v.is_finite()) {
                return Err(ConfigError::NonFiniteCenter(i).into());
            }
        }
        for i in 0..self.centers.len() {
            for j in (i + 1)..self.centers.len() {
                let d = distance(self.centers[i], self.centers[j]);
                if d <= 2.0 * self.epsilon {
                    return Err(ConfigError::CentersTooClose {
                        i,
                        j,
                        distance: d,
                        epsilon: self.epsilon,
                    }
                    .into());
                }
            }
        }
        if let Some(debug) = &self.debug {
            if let Some(masses) = &debug.masses {
                if masses.len() != self.centers.len() {
                    return Err(ConfigError::MassCount {
                        masses: masses.len(),
                        centers: self.centers.len(),
                    }
                    .into());
                }
                if let Some(&bad) = masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
                    return Err(ConfigError::NonPositiveMass(bad).into());
                }
            }
            if let Some((index, _)) = debug.connection_scale {
                if index >= self.centers.len() {
                    return Err(ConfigError::PerturbationIndex {
                        index,
                        count: self.centers.len(),
                    }
                    .into());
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn mass(&self) -> f64 {
        self.mass
    }

    #[inline]
    pub fn centers(&self) -> &[[f64; 3]] {
        &self.centers
    }

    /// Number of NUT centers `k`.
    #[inline]
    pub fn k(&self) -> usize {
        self.centers.len()
    }

    #[inline]
    pub fn exclusion_radius(&self) -> f64 {
        self.epsilon
    }

    pub fn debug(&self) -> Option<&DebugPerturbation> {
        self.debug.as_ref()
    }

    pub fn is_perturbed(&self) -> bool {
        self.debug.is_some()
    }

    /// Asymptotic fibre length `L = 8 pi m`, also the period of `t`.
    #[inline]
    pub fn fiber_period(&self) -> f64 {
        8.0 * PI * self.mass
    }

    /// Mass parameter of center `i` (equal to `m` unless perturbed).
    #[inline]
    pub fn center_mass(&self, i: usize) -> f64 {
        match self.debug.as_ref().and_then(|d| d.masses.as_ref()) {
            Some(masses) => masses[i],
            None => self.mass,
        }
    }

    /// Scale applied to the Dirac potential of center `i`.
    #[inline]
    pub fn connection_scale(&self, i: usize) -> f64 {
        match self.debug.as_ref().and_then(|d| d.connection_scale) {
            Some((j, s)) if j == i => s,
            _ => 1.0,
        }
    }

    /// `sum m_i`, the expected boundary-integral mass.
    pub fn total_mass(&self) -> f64 {
        (0..self.k()).map(|i| self.center_mass(i)).sum()
    }

    pub fn diameter(&self) -> f64 {
        diameter_of(&self.centers)
    }

    /// Mass-weighted centroid of the centers (origin when `k = 0`).
    pub fn centroid(&self) -> [f64; 3] {
        let total = self.total_mass();
        if total == 0.0 {
            return [0.0; 3];
        }
        let mut c = [0.0; 3];
        for (i, a) in self.centers.iter().enumerate() {
            let w = self.center_mass(i) / total;
            for d in 0..3 {
                c[d] += w * a[d];
            }
        }
        c
    }

    /// Length scale of the configuration: the larger of the center-set
    /// diameter and `8 sum m_i`, or 1 for the flat model.
    ///
    /// Far-field radius schedules are expressed in multiples of this.
    pub fn length_scale(&self) -> f64 {
        let l = self.diameter().max(8.0 * self.total_mass());
        if l > 0.0 {
            l
        } else {
            1.0
        }
    }

    /// Largest `|a_i|`.
    pub fn max_center_norm(&self) -> f64 {
        self.centers.iter().map(|a| norm3(*a)).fold(0.0, f64::max)
    }

    /// Smallest distance between two centers (infinite for `k < 2`).
    pub fn min_separation(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                d = d.min(distance(*a, *b));
            }
        }
        d
    }

    /// `Ok` when `x` is outside every exclusion ball.
    pub fn check_admissible(&self, x: [f64; 3]) -> Result<()> {
        for (i, a) in self.centers.iter().enumerate() {
            let d = distance(x, *a);
            if !(d >= self.epsilon) {
                return Err(Error::InsideExclusion {
                    center: i,
                    point: x,
                    distance: d,
                });
            }
        }
        Ok(())
    }
}
