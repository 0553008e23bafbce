//! JSON configuration files and named presets.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use taubnut_core::config::DebugPerturbation;
use taubnut_core::InstantonConfig;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: {source}")]
    Invalid {
        origin: String,
        #[source]
        source: taubnut_core::Error,
    },
    #[error("unknown preset {0:?} (try `preset-list`)")]
    UnknownPreset(String),
}

/// On-disk form of an [`InstantonConfig`].
///
/// ```json
/// {"m": 0.5, "centers": [[0, 0, 0]], "epsilon": 0.001}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub m: f64,
    #[serde(default)]
    pub centers: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Negative-control perturbations; never present in a physical model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub debug: Option<DebugFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DebugFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection_scale: Option<ConnectionScale>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionScale {
    pub center: usize,
    pub factor: f64,
}

impl ConfigFile {
    pub fn build(&self) -> taubnut_core::Result<InstantonConfig> {
        let config = match self.epsilon {
            Some(eps) => InstantonConfig::with_exclusion_radius(self.m, self.centers.clone(), eps)?,
            None => InstantonConfig::new(self.m, self.centers.clone())?,
        };
        match &self.debug {
            None => Ok(config),
            Some(d) => config.with_debug(DebugPerturbation {
                masses: d.masses.clone(),
                connection_scale: d.connection_scale.map(|s| (s.center, s.factor)),
            }),
        }
    }

    pub fn from_config(config: &InstantonConfig) -> Self {
        ConfigFile {
            m: config.mass(),
            centers: config.centers().to_vec(),
            epsilon: Some(config.exclusion_radius()),
            debug: config.debug().map(|d| DebugFile {
                masses: d.masses.clone(),
                connection_scale: d
                    .connection_scale
                    .map(|(center, factor)| ConnectionScale { center, factor }),
            }),
        }
    }
}

pub fn parse_config(text: &str, origin: &Path) -> Result<InstantonConfig, LoadError> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| LoadError::Parse {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.build().map_err(|source| LoadError::Invalid {
        origin: origin.display().to_string(),
        source,
    })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<InstantonConfig, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> ConfigFile,
}

impl Preset {
    pub fn file(&self) -> ConfigFile {
        (self.build)()
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "flat",
        description: "k = 0: flat R^3 x S^1 with m = 0.5",
        build: || ConfigFile {
            m: 0.5,
            centers: vec![],
            epsilon: None,
            debug: None,
        },
    },
    Preset {
        name: "taub-nut",
        description: "k = 1: Taub-NUT with m = 0.5, NUT at the origin",
        build: || ConfigFile {
            m: 0.5,
            centers: vec![[0.0; 3]],
            epsilon: None,
            debug: None,
        },
    },
    Preset {
        name: "two-center",
        description: "k = 2: m = 0.25, centers at (+-1, 0, 0)",
        build: || ConfigFile {
            m: 0.25,
            centers: vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
            epsilon: None,
            debug: None,
        },
    },
    Preset {
        name: "ak",
        description: "k = 3: m = 0.25, centers evenly spaced on the x1 axis",
        build: || ConfigFile {
            m: 0.25,
            centers: vec![[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            epsilon: None,
            debug: None,
        },
    },
    Preset {
        name: "perturbed-connection",
        description: "negative control: Taub-NUT with the Dirac potential scaled by 1.25",
        build: || ConfigFile {
            m: 0.5,
            centers: vec![[0.0; 3]],
            epsilon: None,
            debug: Some(DebugFile {
                masses: None,
                connection_scale: Some(ConnectionScale {
                    center: 0,
                    factor: 1.25,
                }),
            }),
        },
    },
    Preset {
        name: "unequal-masses",
        description:
            "negative control: two centers with masses 0.25 and 0.4 on a period of 8 pi 0.25",
        build: || ConfigFile {
            m: 0.25,
            centers: vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
            epsilon: None,
            debug: Some(DebugFile {
                masses: Some(vec![0.25, 0.4]),
                connection_scale: None,
            }),
        },
    },
];

pub fn preset(name: &str) -> Result<InstantonConfig, LoadError> {
    let p = PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| LoadError::UnknownPreset(name.to_string()))?;
    p.file().build().map_err(|source| LoadError::Invalid {
        origin: format!("preset {name}"),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_file() {
        let c = parse_config(r#"{"m": 0.5, "centers": []}"#, Path::new("inline")).unwrap();
        assert_eq!(c.k(), 0);
        assert_eq!(c.fiber_period(), 4.0 * PI);
    }

    #[test]
    fn taub_nut_file() {
        let c = parse_config(r#"{"m": 0.5, "centers": [[0,0,0]]}"#, Path::new("inline")).unwrap();
        assert_eq!(c.k(), 1);
        assert_eq!(c, preset("taub-nut").unwrap());
    }

    #[test]
    fn duplicate_centers_are_rejected() {
        let err = parse_config(
            r#"{"m": 0.5, "centers": [[1,0,0],[1,0,0]]}"#,
            Path::new("dup.json"),
        )
        .unwrap_err();
        assert!(matches!(err, LoadError::Invalid { .. }), "{err}");
        assert!(err.to_string().contains("dup.json"));
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_config(
            "{\"m\": 0.5,\n \"centers\": [[0,0]]}",
            Path::new("bad.json"),
        )
        .unwrap_err();
        match err {
            LoadError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other}"),
        }
        assert!(matches!(
            parse_config(r#"{"m": 0.5, "mass": 1}"#, Path::new("x")),
            Err(LoadError::Parse { .. })
        ));
    }

    #[test]
    fn presets_build_and_round_trip() {
        for p in PRESETS {
            let c = preset(p.name).unwrap();
            let again = ConfigFile::from_config(&c).build().unwrap();
            assert_eq!(c, again, "{}", p.name);
        }
        assert!(matches!(preset("nope"), Err(LoadError::UnknownPreset(_))));
    }
}
