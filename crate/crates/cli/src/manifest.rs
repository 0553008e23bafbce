//! Run manifests: everything that determines a verification report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config_file::{self, ConfigFile, LoadError};
use crate::suite::CheckName;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub config: ConfigFile,
    /// Checks to run, in report order. Empty means the default suite.
    #[serde(default)]
    pub suite: Vec<CheckName>,
    /// Per-check tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<CheckName, f64>,
    /// Multiplies every tolerance.
    #[serde(default = "one")]
    pub tol_scale: f64,
    #[serde(default)]
    pub samples: SampleCounts,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub radii: RadiusOverrides,
    #[serde(default)]
    pub outputs: Outputs,
    /// Wall times make reports differ between runs, so they are opt-in.
    #[serde(default)]
    pub record_timings: bool,
}

fn one() -> f64 {
    1.0
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleCounts {
    /// Random points for pointwise identities.
    pub points: usize,
    /// Random points for the harmonic-coordinate check.
    pub harmonic_points: usize,
    /// Random points for the finite-difference oracle.
    pub oracle_points: usize,
    /// Low-discrepancy nodes per sphere for sups.
    pub sphere_nodes: usize,
    /// Gauss-Legendre nodes in `cos theta` for surface integrals.
    pub n_theta: usize,
    /// Trapezoid nodes in `phi` for surface integrals.
    pub n_phi: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            points: 500,
            harmonic_points: 200,
            oracle_points: 100,
            sphere_nodes: 2000,
            n_theta: 64,
            n_phi: 128,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiusOverrides {
    pub mass: Option<Vec<f64>>,
    pub decay: Option<Vec<f64>>,
    pub volume: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
}

impl RunManifest {
    pub fn new(config: ConfigFile) -> Self {
        RunManifest {
            config,
            suite: Vec::new(),
            tolerances: BTreeMap::new(),
            tol_scale: 1.0,
            samples: SampleCounts::default(),
            seed: DEFAULT_SEED,
            radii: RadiusOverrides::default(),
            outputs: Outputs::default(),
            record_timings: false,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| LoadError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        // validate the embedded configuration up front
        manifest
            .config
            .build()
            .map_err(|source| LoadError::Invalid {
                origin: path.display().to_string(),
                source,
            })?;
        Ok(manifest)
    }

    pub fn preset(name: &str) -> Result<Self, LoadError> {
        let c = config_file::preset(name)?;
        Ok(Self::new(ConfigFile::from_config(&c)))
    }

    /// The selected checks, or the whole default suite.
    pub fn checks(&self) -> Vec<CheckName> {
        if self.suite.is_empty() {
            CheckName::ALL.to_vec()
        } else {
            self.suite.clone()
        }
    }

    pub fn tolerance(&self, check: CheckName) -> f64 {
        let flat = self.config.centers.is_empty();
        self.tolerances
            .get(&check)
            .copied()
            .unwrap_or_else(|| check.default_tolerance(flat))
            * self.tol_scale
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("manifest serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let m: RunManifest =
            serde_json::from_str(r#"{"config": {"m": 0.5, "centers": [[0,0,0]]}}"#).unwrap();
        assert_eq!(m.seed, DEFAULT_SEED);
        assert_eq!(m.tol_scale, 1.0);
        assert_eq!(m.checks(), CheckName::ALL.to_vec());
        assert_eq!(m.samples.points, 500);
    }

    #[test]
    fn digest_tracks_content() {
        let a = RunManifest::preset("taub-nut").unwrap();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.seed += 1;
        assert_ne!(a.digest(), b.digest());
        let round: RunManifest = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(round, a);
    }

    #[test]
    fn tolerance_scaling() {
        let mut m = RunManifest::preset("flat").unwrap();
        m.tol_scale = 10.0;
        m.tolerances.insert(CheckName::Mass, 0.5);
        assert_eq!(m.tolerance(CheckName::Mass), 5.0);
        assert!((m.tolerance(CheckName::FluxQuantization) / 1e-7 - 1.0).abs() < 1e-12);
    }
}
