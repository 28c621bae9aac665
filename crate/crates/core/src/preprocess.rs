//! Log transform and Gaussian-kernel detrending of price series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{PriceSeries, ResidualSeries};
use crate::stats;

/// Gaussian smoother: kernel standard deviation `bandwidth_days`, support cut
/// at `±floor(truncation_multiple * bandwidth_days)` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmootherConfig {
    pub bandwidth_days: f64,
    pub truncation_multiple: f64,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        Self { bandwidth_days: 30.0, truncation_multiple: 3.0 }
    }
}

impl SmootherConfig {
    pub fn new(bandwidth_days: f64, truncation_multiple: f64) -> Result<Self> {
        let cfg = Self { bandwidth_days, truncation_multiple };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_days > 0.0) || !self.bandwidth_days.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth_days
            )));
        }
        if !(self.truncation_multiple >= 1.0) || !self.truncation_multiple.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "truncation multiple must be >= 1, got {}",
                self.truncation_multiple
            )));
        }
        Ok(())
    }

    /// Kernel half-width in samples.
    pub fn radius(&self) -> usize {
        (self.truncation_multiple * self.bandwidth_days).floor() as usize
    }

    /// Unnormalized taps for offsets `0..=radius`.
    fn half_kernel(&self) -> Vec<f64> {
        let two_var = 2.0 * self.bandwidth_days * self.bandwidth_days;
        (0..=self.radius()).map(|k| (-((k * k) as f64) / two_var).exp()).collect()
    }
}

/// `ln(p + 1)` for every price.
pub fn log_transform(prices: &[f64]) -> Result<Vec<f64>> {
    prices
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if value.is_finite() && value >= 0.0 {
                Ok(value.ln_1p())
            } else {
                Err(Error::InvalidPrice { index, value })
            }
        })
        .collect()
}

/// Gaussian-weighted moving average. Near the ends the truncated kernel is
/// renormalized over the available samples, so the weights at every index
/// sum to one.
pub fn gaussian_smooth(x: &[f64], cfg: &SmootherConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if x.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: x.len() });
    }
    let half = cfg.half_kernel();
    let radius = half.len() - 1;
    let n = x.len();
    let trend = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(n - 1);
            let mut num = 0.0;
            let mut den = 0.0;
            for (j, xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                let w = half[i.abs_diff(j)];
                num += w * xj;
                den += w;
            }
            num / den
        })
        .collect();
    Ok(trend)
}

/// Normalized kernel weights applied at position `i` of a series of length
/// `n`, as `(j, weight)` pairs.
pub fn kernel_weights(i: usize, n: usize, cfg: &SmootherConfig) -> Vec<(usize, f64)> {
    let half = cfg.half_kernel();
    let radius = half.len() - 1;
    let lo = i.saturating_sub(radius);
    let hi = (i + radius).min(n.saturating_sub(1));
    let den: f64 = (lo..=hi).map(|j| half[i.abs_diff(j)]).sum();
    (lo..=hi).map(|j| (j, half[i.abs_diff(j)] / den)).collect()
}

/// `x - gaussian_smooth(x)`.
pub fn residuals_of(x: &[f64], cfg: &SmootherConfig) -> Result<Vec<f64>> {
    let trend = gaussian_smooth(x, cfg)?;
    Ok(x.iter().zip(&trend).map(|(v, t)| v - t).collect())
}

/// Residual spread (relative to the log-price magnitude) treated as zero.
const DEGENERATE_REL_STD: f64 = 1e-12;

/// Log-transform then subtract the Gaussian trend.
pub fn detrend(prices: &PriceSeries, cfg: &SmootherConfig) -> Result<ResidualSeries> {
    cfg.validate()?;
    let needed = (2 * cfg.radius()).max(2);
    if prices.len() < needed {
        return Err(Error::TooShort { needed, got: prices.len() });
    }
    let logged = log_transform(prices.prices())?;
    let values = residuals_of(&logged, cfg)?;
    let scale = logged.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if stats::sample_std(&values) <= DEGENERATE_REL_STD * scale {
        return Err(Error::Degenerate("residuals have zero variance".into()));
    }
    ResidualSeries::new(prices.asset_id(), prices.dates().to_vec(), values)
}

/// Sample mean and (n-1) standard deviation of a residual series.
pub fn summary_stats(r: &ResidualSeries) -> (f64, f64) {
    stats::mean_std(r.values())
}
