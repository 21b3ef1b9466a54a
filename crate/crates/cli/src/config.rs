use radswap_core::kmc_sim::SimConfig;
use radswap_core::pde_solver::CoupledConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: missing [{section}] section")]
    MissingSection { path: PathBuf, section: &'static str },
    #[error("{0}")]
    Invalid(String),
}

/// Simulation units every physical quantity in the file is expressed in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub length: String,
    pub time: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(default = "one")]
    pub replicas: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pde: Option<CoupledConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmc: Option<SimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSection>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn pde(&self, path: &Path) -> Result<&CoupledConfig, ConfigError> {
        self.pde.as_ref().ok_or(ConfigError::MissingSection {
            path: path.to_path_buf(),
            section: "pde",
        })
    }

    pub fn kmc(&self, path: &Path) -> Result<&SimConfig, ConfigError> {
        self.kmc.as_ref().ok_or(ConfigError::MissingSection {
            path: path.to_path_buf(),
            section: "kmc",
        })
    }

    pub fn replicas(&self) -> u64 {
        self.ensemble.as_ref().map_or(1, |e| e.replicas)
    }
}
