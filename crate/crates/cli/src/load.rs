//! `date,close` CSV ingestion.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use slowdown_core::PriceSeries;

use crate::error::{io_err, PipelineError, Result};

/// Longest run of missing days forward-fill will bridge.
pub const MAX_FILL_GAP: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapPolicy {
    #[default]
    Error,
    ForwardFill,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub series: PriceSeries,
    /// Days synthesized by forward-fill.
    pub fill_count: usize,
}

pub fn load_csv(path: &Path, asset_id: &str, policy: GapPolicy) -> Result<Loaded> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    parse_csv(&bytes, path, asset_id, policy)
}

pub fn parse_csv(bytes: &[u8], path: &Path, asset_id: &str, policy: GapPolicy) -> Result<Loaded> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| PipelineError::Malformed { path: path.into(), line: 1, message: e.to_string() })?
        .clone();
    if header.len() != 2 || &header[0] != "date" || &header[1] != "close" {
        return Err(PipelineError::BadHeader {
            path: path.into(),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| PipelineError::Malformed {
            path: path.into(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let malformed = |message: String| PipelineError::Malformed { path: path.into(), line, message };
        if record.len() != 2 {
            return Err(malformed(format!("expected 2 fields, found {}", record.len())));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| malformed(format!("bad date `{}`: {e}", &record[0])))?;
        let close: f64 =
            record[1].parse().map_err(|e| malformed(format!("bad close `{}`: {e}", &record[1])))?;
        if !close.is_finite() || close < 0.0 {
            return Err(malformed(format!("close must be finite and non-negative, got {close}")));
        }
        rows.push((date, close));
    }
    if rows.is_empty() {
        return Err(PipelineError::NoData(asset_id.to_owned()));
    }
    rows.sort_by_key(|(d, _)| *d);

    let mut dates: Vec<NaiveDate> = Vec::with_capacity(rows.len());
    let mut prices: Vec<f64> = Vec::with_capacity(rows.len());
    let mut fill_count = 0;
    for (date, close) in rows {
        if let (Some(&prev), Some(&last)) = (dates.last(), prices.last()) {
            let step = (date - prev).num_days();
            if step == 0 {
                return Err(PipelineError::DuplicateDate(date));
            }
            if step > 1 {
                let missing = step - 1;
                if policy == GapPolicy::Error || missing > MAX_FILL_GAP {
                    return Err(PipelineError::Gap { after: prev, before: date, missing });
                }
                let mut d: NaiveDate = prev;
                for _ in 0..missing {
                    d = d.succ_opt().expect("date in range");
                    dates.push(d);
                    prices.push(last);
                    fill_count += 1;
                }
            }
        }
        dates.push(date);
        prices.push(close);
    }
    let series = PriceSeries::new(asset_id, dates, prices)?;
    Ok(Loaded { series, fill_count })
}

/// Renders a series in the `date,close` format `load_csv` reads.
pub fn to_csv(series: &PriceSeries) -> String {
    let mut out = String::from("date,close\n");
    for (d, p) in series.dates().iter().zip(series.prices()) {
        out.push_str(&format!("{},{}\n", d.format("%Y-%m-%d"), p));
    }
    out
}
