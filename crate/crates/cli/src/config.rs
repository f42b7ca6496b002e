use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kazhdan::certify::CertifyConfig;
use kazhdan::sos::SolverConfig;
use serde::{Deserialize, Serialize};

/// Settings read from `--config`. Command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub constants: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
    pub radius: Option<usize>,
    pub target: Option<String>,
    pub solver: SolverConfig,
    pub certify: CertifyConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}
