//! Rolling lag-1 autocorrelation and standard deviation, and warning events
//! from jumps in the rolling standard deviation.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::ResidualSeries;
use crate::stats;

/// Tolerance past ±1 accepted from the AR1 estimator before clamping.
pub const AR1_BOUND_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window_days: usize,
    pub step_days: usize,
}

impl WindowConfig {
    pub fn new(window_days: usize) -> Self {
        Self { window_days, step_days: 1 }
    }

    pub fn validate(&self, series_len: usize) -> Result<()> {
        if self.window_days < 3 {
            return Err(Error::InvalidConfig(format!(
                "window must be at least 3 days, got {}",
                self.window_days
            )));
        }
        if self.step_days == 0 {
            return Err(Error::InvalidConfig("step must be at least 1 day".into()));
        }
        if self.window_days > series_len {
            return Err(Error::TooShort { needed: self.window_days, got: series_len });
        }
        Ok(())
    }
}

/// Per-window indicators; `end_dates[i]` is the last day of window `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSeries {
    pub asset_id: String,
    pub window: WindowConfig,
    pub end_dates: Vec<NaiveDate>,
    pub ar1: Vec<f64>,
    pub std: Vec<f64>,
    /// Number of AR1 values clamped back into [-1, 1].
    pub ar1_clamped: usize,
}

impl IndicatorSeries {
    pub fn len(&self) -> usize {
        self.end_dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.end_dates.is_empty()
    }
}

/// How consecutive 20-day intervals are differenced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaMode {
    /// `std(t) - std(t - delta_days)` at every indicator date.
    #[default]
    Rolling,
    /// Difference between the ends of adjacent disjoint blocks, held constant
    /// over each block.
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub delta_days: usize,
    pub theta_multiplier: f64,
    /// Runs separated by fewer than this many days are merged.
    pub merge_gap_days: i64,
    pub mode: DeltaMode,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self { delta_days: 20, theta_multiplier: 1.0, merge_gap_days: 3, mode: DeltaMode::Rolling }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.delta_days == 0 {
            return Err(Error::InvalidConfig("delta must be at least 1 day".into()));
        }
        if !(self.theta_multiplier > 0.0) || !self.theta_multiplier.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "theta multiplier must be positive, got {}",
                self.theta_multiplier
            )));
        }
        if self.merge_gap_days < 1 {
            return Err(Error::InvalidConfig("merge gap must be at least 1 day".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarningEvent {
    pub asset_id: String,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub peak_abs_delta_std: f64,
    pub theta: f64,
}

/// `|ΔStd|`-ready differences aligned with their dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaStd {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

/// Lag-1 autocorrelation: lag-1 autocovariance over `n-1` pairs divided by
/// the sample variance, both around the window mean.
pub fn ar1(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    let (mu, sd) = stats::mean_std(x);
    if !(sd > 0.0) {
        return Err(Error::Degenerate("zero-variance window".into()));
    }
    let cov: f64 =
        x.windows(2).map(|w| (w[0] - mu) * (w[1] - mu)).sum::<f64>() / (n as f64 - 1.0);
    Ok(cov / (sd * sd))
}

/// Trailing-window AR1 and Std for every window end stepping by `step_days`.
pub fn rolling_indicators(r: &ResidualSeries, w: WindowConfig) -> Result<IndicatorSeries> {
    w.validate(r.len())?;
    let x = r.values();
    let mut out = IndicatorSeries {
        asset_id: r.asset_id().to_owned(),
        window: w,
        end_dates: Vec::new(),
        ar1: Vec::new(),
        std: Vec::new(),
        ar1_clamped: 0,
    };
    for end in (w.window_days - 1..x.len()).step_by(w.step_days) {
        let win = &x[end + 1 - w.window_days..=end];
        let end_date = r.dates()[end];
        let sd = stats::sample_std(win);
        let a = ar1(win).map_err(|_| Error::DegenerateWindow { end_date })?;
        let clamped = a.clamp(-1.0, 1.0);
        if clamped != a {
            debug_assert!((a - clamped).abs() <= AR1_BOUND_EPS, "AR1 {a} far out of bounds");
            out.ar1_clamped += 1;
        }
        out.end_dates.push(end_date);
        out.ar1.push(clamped);
        out.std.push(sd);
    }
    Ok(out)
}

/// Differences of the Std track across `delta_days`.
pub fn delta_std(ind: &IndicatorSeries, cfg: &ThresholdConfig) -> Result<DeltaStd> {
    cfg.validate()?;
    let step = ind.window.step_days.max(1);
    if !cfg.delta_days.is_multiple_of(step) {
        return Err(Error::InvalidConfig(format!(
            "delta ({}) must be a multiple of the window step ({step})",
            cfg.delta_days
        )));
    }
    let lag = cfg.delta_days / step;
    if ind.len() <= lag {
        return Err(Error::TooShort { needed: lag + 1, got: ind.len() });
    }
    let s = &ind.std;
    Ok(match cfg.mode {
        DeltaMode::Rolling => DeltaStd {
            dates: ind.end_dates[lag..].to_vec(),
            values: (lag..s.len()).map(|i| s[i] - s[i - lag]).collect(),
        },
        DeltaMode::Block => {
            let mut values = Vec::new();
            let mut k = lag;
            while k < s.len() {
                let d = s[k] - s[k - lag];
                let block_end = (k + lag).min(s.len());
                values.extend(std::iter::repeat_n(d, block_end - k));
                k += lag;
            }
            DeltaStd { dates: ind.end_dates[lag..].to_vec(), values }
        }
    })
}

/// Maximal runs of dates with `|ΔStd| > θ`, θ = multiplier × residual std.
pub fn detect_warnings(
    r: &ResidualSeries,
    ind: &IndicatorSeries,
    cfg: &ThresholdConfig,
) -> Result<Vec<WarningEvent>> {
    let delta = delta_std(ind, cfg)?;
    let theta = cfg.theta_multiplier * r.std();
    Ok(events_from_delta(&ind.asset_id, &delta, theta, cfg.merge_gap_days))
}

/// Groups exceedances of `theta` into events, merging runs that are fewer
/// than `merge_gap_days` apart.
pub fn events_from_delta(
    asset_id: &str,
    delta: &DeltaStd,
    theta: f64,
    merge_gap_days: i64,
) -> Vec<WarningEvent> {
    let mut events: Vec<WarningEvent> = Vec::new();
    for (date, v) in delta.dates.iter().zip(&delta.values) {
        let a = v.abs();
        if !(a > theta) {
            continue;
        }
        match events.last_mut() {
            Some(ev) if (*date - ev.end_date).num_days() < merge_gap_days => {
                ev.end_date = *date;
                ev.peak_abs_delta_std = ev.peak_abs_delta_std.max(a);
            }
            _ => events.push(WarningEvent {
                asset_id: asset_id.to_owned(),
                start_date: *date,
                end_date: *date,
                peak_abs_delta_std: a,
                theta,
            }),
        }
    }
    events
}
