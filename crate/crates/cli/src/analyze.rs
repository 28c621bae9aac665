//! Per-asset pipeline: load, log-detrend, stationarity gate, rolling
//! indicators and warning events.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use slowdown_core::indicators::{detect_warnings, rolling_indicators, IndicatorSeries, WarningEvent, WindowConfig};
use slowdown_core::preprocess::detrend;
use slowdown_core::stationarity::{adf_test, is_stationary, kpss_test, StationarityReport};
use slowdown_core::{PriceSeries, ResidualSeries};

use crate::config::{sha256_hex, AnalysisSettings};
use crate::error::{PipelineError, Result};
use crate::fetch::{fetch_remote, FetchConfig};
use crate::load::{parse_csv, Loaded};

pub const SCHEMA_VERSION: u32 = 1;
pub const SKIPPED_NON_STATIONARY: &str = "skipped: non-stationary residuals";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssetStatus {
    Analyzed,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetRecord {
    pub asset_id: String,
    pub status: AssetStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adf: Option<StationarityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kpss: Option<StationarityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary: Option<bool>,
    pub indicators: Vec<IndicatorSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub warnings: Vec<WarningEvent>,
}

impl AssetRecord {
    fn failed(asset_id: &str, reason: String) -> Self {
        Self {
            asset_id: asset_id.to_owned(),
            status: AssetStatus::Failed,
            reason: Some(reason),
            residuals: None,
            adf: None,
            kpss: None,
            stationary: None,
            indicators: Vec::new(),
            theta: None,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub sha256: String,
    pub n_points: usize,
    pub fill_count: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub code_version: String,
    pub settings: AnalysisSettings,
    pub inputs: BTreeMap<String, InputInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub assets: Vec<AssetRecord>,
}

impl AnalysisReport {
    /// 0 when every asset was analyzed, 1 when none was, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        let ok = self.assets.iter().filter(|a| a.status == AssetStatus::Analyzed).count();
        if ok == self.assets.len() {
            0
        } else if ok == 0 {
            1
        } else {
            2
        }
    }
}

/// Series kept alongside the report for CSV and plot output.
#[derive(Debug, Clone)]
pub struct AssetData {
    pub prices: PriceSeries,
    pub residuals: Option<ResidualSeries>,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: AnalysisReport,
    pub data: BTreeMap<String, AssetData>,
}

/// Raw input for one asset.
#[derive(Debug, Clone)]
pub struct Input {
    pub loaded: Loaded,
    pub info: InputInfo,
}

/// Reads `<data_dir>/<ASSET>.csv`, falling back to the remote endpoint (and
/// its cache) when the file is absent and `fetch` is configured.
pub fn load_input(
    asset: &str,
    settings: &AnalysisSettings,
    data_dir: &Path,
    fetch: Option<&FetchConfig>,
) -> Result<Input> {
    let path = data_dir.join(format!("{asset}.csv"));
    let (bytes, source) = match std::fs::read(&path) {
        Ok(bytes) => (bytes, path.display().to_string()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => match fetch {
            Some(cfg) => {
                let series = fetch_remote(asset, settings.from, settings.to, cfg)?;
                (crate::load::to_csv(&series).into_bytes(), cfg.base_url.to_string())
            }
            None => return Err(PipelineError::Io { path, source: e }),
        },
        Err(e) => return Err(PipelineError::Io { path, source: e }),
    };
    let loaded = parse_csv(&bytes, &path, asset, settings.gap_policy)?;
    let info = InputInfo {
        sha256: sha256_hex(&bytes),
        n_points: loaded.series.len(),
        fill_count: loaded.fill_count,
        source,
    };
    Ok(Input { loaded, info })
}

/// Steps 2-4 for a single asset: detrend, stationarity gate, indicators and
/// warnings. Non-stationary residuals stop the asset with a skipped record.
pub fn analyze_series(prices: &PriceSeries, settings: &AnalysisSettings) -> (AssetRecord, Option<ResidualSeries>) {
    let id = prices.asset_id();
    let residuals = match detrend(prices, &settings.smoother) {
        Ok(r) => r,
        Err(e) => return (AssetRecord::failed(id, e.to_string()), None),
    };
    let mut record = AssetRecord::failed(id, String::new());
    record.residuals =
        Some(ResidualSummary { mean: residuals.mean(), std: residuals.std(), n: residuals.len() });

    let tests = adf_test(residuals.values(), None, settings.alpha)
        .and_then(|adf| Ok((adf, kpss_test(residuals.values(), None, settings.alpha)?)));
    let (adf, kpss) = match tests {
        Ok(pair) => pair,
        Err(e) => {
            record.reason = Some(format!("stationarity test failed: {e}"));
            return (record, Some(residuals));
        }
    };
    let stationary = is_stationary(&adf, &kpss);
    record.adf = Some(adf);
    record.kpss = Some(kpss);
    record.stationary = Some(stationary);
    if !stationary {
        record.status = AssetStatus::Skipped;
        record.reason = Some(SKIPPED_NON_STATIONARY.into());
        return (record, Some(residuals));
    }

    let warning_window = settings.warning_window();
    for &w in &settings.windows {
        let ind = match rolling_indicators(&residuals, WindowConfig::new(w)) {
            Ok(ind) => ind,
            Err(e) => {
                record.reason = Some(format!("window {w}: {e}"));
                return (record, Some(residuals));
            }
        };
        if w == warning_window {
            match detect_warnings(&residuals, &ind, &settings.threshold) {
                Ok(events) => {
                    record.theta = Some(settings.threshold.theta_multiplier * residuals.std());
                    record.warnings = events;
                }
                Err(e) => {
                    record.reason = Some(format!("warnings: {e}"));
                    return (record, Some(residuals));
                }
            }
        }
        record.indicators.push(ind);
    }
    record.status = AssetStatus::Analyzed;
    record.reason = None;
    (record, Some(residuals))
}

/// Runs every asset (in parallel on the current rayon pool) and assembles
/// the report in the configured asset order.
pub fn run_analyze(
    settings: &AnalysisSettings,
    data_dir: &Path,
    fetch: Option<&FetchConfig>,
) -> Result<Analysis> {
    settings.validate()?;
    let results: Vec<(AssetRecord, Option<(InputInfo, AssetData)>)> = settings
        .assets
        .par_iter()
        .map(|asset| {
            let input = match load_input(asset, settings, data_dir, fetch) {
                Ok(input) => input,
                Err(e) => return (AssetRecord::failed(asset, e.to_string()), None),
            };
            let prices = input.loaded.series.slice_dates(settings.from, settings.to);
            if prices.is_empty() {
                return (AssetRecord::failed(asset, "no data in the requested date range".into()), None);
            }
            let (record, residuals) = analyze_series(&prices, settings);
            (record, Some((input.info, AssetData { prices, residuals })))
        })
        .collect();

    let mut inputs = BTreeMap::new();
    let mut data = BTreeMap::new();
    let mut assets = Vec::with_capacity(results.len());
    for (record, extra) in results {
        if let Some((info, d)) = extra {
            inputs.insert(record.asset_id.clone(), info);
            data.insert(record.asset_id.clone(), d);
        }
        assets.push(record);
    }
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance {
            config_hash: settings.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_owned(),
            settings: settings.clone(),
            inputs,
        },
        assets,
    };
    Ok(Analysis { report, data })
}
