//! Analysis configuration and its content hash.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use slowdown_core::indicators::ThresholdConfig;
use slowdown_core::preprocess::SmootherConfig;

use crate::error::{io_err, PipelineError, Result};
use crate::load::GapPolicy;

/// Everything that influences analysis results. Hashed into the report's
/// provenance and into output file names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSettings {
    pub assets: Vec<String>,
    pub from: NaiveDate,
    pub to: NaiveDate,
    #[serde(default)]
    pub smoother: SmootherConfig,
    #[serde(default = "default_windows")]
    pub windows: Vec<usize>,
    /// Window whose Std track drives warning detection; smallest window if unset.
    #[serde(default)]
    pub warning_window: Option<usize>,
    #[serde(default)]
    pub threshold: ThresholdConfig,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub gap_policy: GapPolicy,
}

fn default_windows() -> Vec<usize> {
    vec![410, 60]
}

fn default_alpha() -> f64 {
    0.05
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            other => Err(PipelineError::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// Where inputs come from and where outputs go; not part of the hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    pub data_dir: PathBuf,
    pub out_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub jobs: Option<usize>,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv, Format::Svg]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub analysis: AnalysisSettings,
    pub output: OutputSettings,
}

impl AnalysisSettings {
    pub fn validate(&self) -> Result<()> {
        if self.assets.is_empty() {
            return Err(PipelineError::Config("no assets given".into()));
        }
        if self.from > self.to {
            return Err(PipelineError::Config(format!("empty date range {}..{}", self.from, self.to)));
        }
        if self.windows.is_empty() {
            return Err(PipelineError::Config("at least one window is required".into()));
        }
        if let Some(w) = self.warning_window {
            if !self.windows.contains(&w) {
                return Err(PipelineError::Config(format!("warning window {w} is not among the configured windows")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(PipelineError::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        self.smoother.validate()?;
        self.threshold.validate()?;
        Ok(())
    }

    pub fn warning_window(&self) -> usize {
        self.warning_window.unwrap_or_else(|| *self.windows.iter().min().expect("validated"))
    }

    /// SHA-256 over the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("settings serialize");
        hex(&Sha256::digest(json))
    }

    /// Leading 12 hex digits of [`Self::hash`], used in file names.
    pub fn short_hash(&self) -> String {
        self.hash()[..12].to_owned()
    }
}

impl AnalysisConfig {
    /// Reads a TOML file, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?
        };
        cfg.analysis.validate()?;
        Ok(cfg)
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}
