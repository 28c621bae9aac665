//! Date-indexed series types shared by the preprocessing and indicator stages.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Daily close prices for one asset on consecutive calendar days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    asset_id: String,
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series, rejecting negative or non-finite prices and any
    /// break in the one-day spacing of `dates`.
    pub fn new(asset_id: impl Into<String>, dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::LengthMismatch { dates: dates.len(), values: prices.len() });
        }
        check_consecutive(&dates)?;
        if let Some((index, &value)) =
            prices.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidPrice { index, value });
        }
        Ok(Self { asset_id: asset_id.into(), dates, prices })
    }

    /// Prices without calendar dates; days are counted from 1970-01-01.
    pub fn from_values(asset_id: impl Into<String>, prices: Vec<f64>) -> Result<Self> {
        Self::new(asset_id, synthetic_dates(prices.len()), prices)
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Restricts the series to `[from, to]` (inclusive).
    pub fn slice_dates(&self, from: NaiveDate, to: NaiveDate) -> Self {
        let (dates, prices) = self
            .dates
            .iter()
            .zip(&self.prices)
            .filter(|(d, _)| **d >= from && **d <= to)
            .map(|(d, p)| (*d, *p))
            .unzip();
        Self { asset_id: self.asset_id.clone(), dates, prices }
    }
}

pub(crate) fn check_consecutive(dates: &[NaiveDate]) -> Result<()> {
    for pair in dates.windows(2) {
        if pair[0].succ_opt() != Some(pair[1]) {
            return Err(Error::NonConsecutiveDates { prev: pair[0], next: pair[1] });
        }
    }
    Ok(())
}

/// Detrended log-price residuals. `mean` and `std` are always the sample
/// statistics of `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSeries {
    asset_id: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    mean: f64,
    std: f64,
}

impl ResidualSeries {
    /// Fails with [`Error::Degenerate`] when the values have zero variance.
    pub fn new(asset_id: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch { dates: dates.len(), values: values.len() });
        }
        if values.len() < 2 {
            return Err(Error::TooShort { needed: 2, got: values.len() });
        }
        let (mean, std) = stats::mean_std(&values);
        if !(std > 0.0) {
            return Err(Error::Degenerate("residuals have zero variance".into()));
        }
        Ok(Self { asset_id: asset_id.into(), dates, values, mean, std })
    }

    /// Residuals without calendar dates (model output); dates are synthesized
    /// as consecutive days from 1970-01-01.
    pub fn from_values(asset_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let dates = synthetic_dates(values.len());
        Self::new(asset_id, dates, values)
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiplies every residual by `factor` (must be non-zero).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.asset_id.clone(),
            self.dates.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
    }
}

pub(crate) fn synthetic_dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch");
    start.iter_days().take(n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn days(n: usize) -> Vec<NaiveDate> {
        NaiveDate::from_ymd_opt(2016, 1, 1).unwrap().iter_days().take(n).collect()
    }

    #[test]
    fn rejects_negative_price_with_index() {
        let err = PriceSeries::new("X", days(3), vec![1.0, -2.0, 3.0]).unwrap_err();
        assert_eq!(err, Error::InvalidPrice { index: 1, value: -2.0 });
    }

    #[test]
    fn rejects_nan_price() {
        let err = PriceSeries::new("X", days(2), vec![f64::NAN, 1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidPrice { index: 0, .. }));
    }

    #[test]
    fn rejects_gap() {
        let mut d = days(4);
        d.remove(2);
        let err = PriceSeries::new("X", d, vec![1.0; 3]).unwrap_err();
        assert!(matches!(err, Error::NonConsecutiveDates { .. }));
    }

    #[test]
    fn zero_prices_allowed() {
        assert!(PriceSeries::new("X", days(2), vec![0.0, 0.0]).is_ok());
    }

    #[test]
    fn residual_stats_match_values() {
        let r = ResidualSeries::from_values("X", vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(r.mean(), 3.0);
        assert!((r.std() - 2.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn constant_residuals_are_degenerate() {
        let err = ResidualSeries::from_values("X", vec![0.0; 10]).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }
}
