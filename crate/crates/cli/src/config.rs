//! Optional TOML configuration. Command-line flags and environment variables
//! take precedence over the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub catalog: Option<PathBuf>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        let cfg: Self = toml::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        if let Some(t) = cfg.tol {
            if t.is_nan() || t <= 0.0 {
                return Err(CliError::Usage(format!("config tol must be > 0, got {t}")));
            }
        }
        Ok(cfg)
    }
}

/// Settings resolved for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub format: Format,
    pub tol: f64,
    pub catalog: PathBuf,
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_CATALOG: &str = "sic-catalog";

impl RunConfig {
    pub fn resolve(command: String, json: bool, catalog: Option<PathBuf>, file: &ConfigFile) -> Self {
        let format = if json { Format::Json } else { file.format.unwrap_or_default() };
        Self {
            command,
            format,
            tol: file.tol.unwrap_or(DEFAULT_TOL),
            catalog: catalog.or_else(|| file.catalog.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_CATALOG)),
        }
    }

    /// A tolerance flag if given, else the configured default.
    pub fn tol(&self, flag: Option<f64>) -> Result<f64, CliError> {
        match flag {
            Some(t) if t.is_nan() || t <= 0.0 => Err(CliError::Usage(format!("--tol must be > 0, got {t}"))),
            Some(t) => Ok(t),
            None => Ok(self.tol),
        }
    }
}
