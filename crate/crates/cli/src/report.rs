//! Writes an [`Analysis`] as JSON, CSV tables and SVG plots.
//!
//! Every file name carries the asset (where per-asset) and the short
//! settings hash, so outputs from different configurations never collide
//! and reruns overwrite identically.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analyze::{Analysis, AnalysisReport, AssetStatus};
use crate::config::Format;
use crate::error::{io_err, Result};
use crate::svg::{days_since, Figure, Panel, Series, XAxis};

/// JSON Schema (draft 7) for the analysis report.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    std::fs::write(path, contents).map_err(io_err(path))
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub(crate) fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn table1(report: &AnalysisReport) -> String {
    let rows = report.assets.iter().map(|a| {
        let (adf, kpss) = (a.adf.as_ref(), a.kpss.as_ref());
        vec![
            a.asset_id.clone(),
            format!("{:?}", a.status).to_lowercase(),
            opt(a.residuals.as_ref().map(|r| r.n)),
            opt(a.residuals.as_ref().map(|r| r.mean)),
            opt(a.residuals.as_ref().map(|r| r.std)),
            opt(adf.map(|t| t.statistic)),
            opt(adf.map(|t| t.p_value)),
            opt(adf.map(|t| t.lags_used)),
            opt(kpss.map(|t| t.statistic)),
            opt(kpss.map(|t| t.p_value)),
            opt(kpss.map(|t| t.lags_used)),
            opt(a.stationary),
            a.reason.clone().unwrap_or_default(),
        ]
    });
    csv_string(
        &[
            "asset", "status", "n", "mean", "std", "adf_statistic", "adf_p_value", "adf_lags",
            "kpss_statistic", "kpss_p_value", "kpss_lags", "stationary", "reason",
        ],
        rows,
    )
}

fn table2(report: &AnalysisReport) -> String {
    let rows = report
        .assets
        .iter()
        .flat_map(|a| a.warnings.iter())
        .enumerate()
        .map(|(i, e)| {
            vec![
                (i + 1).to_string(),
                e.asset_id.clone(),
                e.start_date.to_string(),
                e.end_date.to_string(),
                ((e.end_date - e.start_date).num_days() + 1).to_string(),
                e.peak_abs_delta_std.to_string(),
                e.theta.to_string(),
            ]
        });
    csv_string(&["number", "asset", "start_date", "end_date", "days", "peak_abs_delta_std", "theta"], rows)
}

/// Writes the requested formats under `out_dir` and returns the paths in
/// the order written.
pub fn emit_report(analysis: &Analysis, formats: &[Format], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let report = &analysis.report;
    let hash = &report.provenance.config_hash[..12];
    let mut written = Vec::new();
    let mut put = |name: String, contents: String| -> Result<()> {
        let path = out_dir.join(name);
        write_file(&path, contents)?;
        written.push(path);
        Ok(())
    };

    if formats.contains(&Format::Json) {
        put(format!("report_{hash}.json"), to_json(report))?;
    }
    if formats.contains(&Format::Csv) {
        put(format!("table1_{hash}.csv"), table1(report))?;
        put(format!("table2_{hash}.csv"), table2(report))?;
        for (id, data) in &analysis.data {
            let residual = data.residuals.as_ref().map(|r| r.values());
            let rows = data.prices.dates().iter().zip(data.prices.prices()).enumerate().map(|(i, (d, p))| {
                vec![d.to_string(), p.to_string(), opt(residual.map(|r| r[i]))]
            });
            put(format!("{id}_{hash}_residuals.csv"), csv_string(&["date", "close", "residual"], rows))?;
        }
        for asset in &report.assets {
            for ind in &asset.indicators {
                let rows = (0..ind.len())
                    .map(|i| vec![ind.end_dates[i].to_string(), ind.ar1[i].to_string(), ind.std[i].to_string()]);
                put(
                    format!("{}_{hash}_indicators_w{}.csv", asset.asset_id, ind.window.window_days),
                    csv_string(&["end_date", "ar1", "std"], rows),
                )?;
            }
        }
    }
    if formats.contains(&Format::Svg) {
        for asset in &report.assets {
            let Some(data) = analysis.data.get(&asset.asset_id) else { continue };
            let Some(&origin) = data.prices.dates().first() else { continue };
            let x = |ds: &[chrono::NaiveDate]| ds.iter().map(|d| days_since(origin, *d)).collect::<Vec<_>>();
            let bands: Vec<(f64, f64)> = asset
                .warnings
                .iter()
                .map(|e| (days_since(origin, e.start_date), days_since(origin, e.end_date) + 1.0))
                .collect();

            let mut panels = vec![Panel {
                y_label: "close".into(),
                series: vec![Series::line("close", x(data.prices.dates()), data.prices.prices().to_vec())],
                hlines: vec![],
                shaded: false,
            }];
            if let Some(r) = &data.residuals {
                let theta = asset.theta.map(|t| vec![(t, "θ".to_string()), (-t, "−θ".to_string())]);
                panels.push(Panel {
                    y_label: "residual".into(),
                    series: vec![Series::line("residual", x(r.dates()), r.values().to_vec())],
                    hlines: theta.unwrap_or_default(),
                    shaded: true,
                });
            }
            let fig = Figure {
                title: format!("{} price and residuals", asset.asset_id),
                x_axis: XAxis::Days(origin),
                x_label: "date".into(),
                panels,
                bands: bands.clone(),
            };
            put(format!("{}_{hash}_series.svg", asset.asset_id), fig.render())?;

            if asset.status == AssetStatus::Analyzed {
                let ar1 = asset.indicators.iter().map(|ind| {
                    Series::line(format!("AR1 w={}", ind.window.window_days), x(&ind.end_dates), ind.ar1.clone())
                });
                let std = asset.indicators.iter().map(|ind| {
                    Series::line(format!("Std w={}", ind.window.window_days), x(&ind.end_dates), ind.std.clone())
                });
                let fig = Figure {
                    title: format!("{} rolling indicators", asset.asset_id),
                    x_axis: XAxis::Days(origin),
                    x_label: "window end date".into(),
                    panels: vec![
                        Panel { y_label: "AR1".into(), series: ar1.collect(), hlines: vec![], shaded: false },
                        Panel { y_label: "Std".into(), series: std.collect(), hlines: vec![], shaded: true },
                    ],
                    bands,
                };
                put(format!("{}_{hash}_indicators.svg", asset.asset_id), fig.render())?;
            }
        }
    }
    Ok(written)
}
