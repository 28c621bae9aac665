//! Unit-root (ADF) and stationarity (KPSS) tests for residual series.

mod adf;
mod kpss;
mod ols;
pub mod tables;

use serde::{Deserialize, Serialize};

pub use adf::{adf_test, schwert_max_lag};
pub use kpss::{kpss_bandwidth, kpss_test, newey_west_lrv};
pub use ols::{ols_fit, OlsFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "ADF")]
    Adf,
    #[serde(rename = "KPSS")]
    Kpss,
}

/// Outcome of one hypothesis test. `reject_null` is `p_value < alpha`; the
/// ADF null is a unit root, the KPSS null is stationarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub test_name: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub lags_used: usize,
    pub reject_null: bool,
    pub n_effective: usize,
    pub alpha: f64,
}

/// Stationary when ADF rejects its unit-root null and KPSS does not reject
/// its stationarity null.
pub fn is_stationary(adf: &StationarityReport, kpss: &StationarityReport) -> bool {
    debug_assert_eq!(adf.test_name, TestKind::Adf);
    debug_assert_eq!(kpss.test_name, TestKind::Kpss);
    adf.reject_null && !kpss.reject_null
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(kind: TestKind, reject: bool) -> StationarityReport {
        StationarityReport {
            test_name: kind,
            statistic: 0.0,
            p_value: if reject { 0.001 } else { 0.5 },
            lags_used: 0,
            reject_null: reject,
            n_effective: 100,
            alpha: 0.05,
        }
    }

    #[test]
    fn combination_rule() {
        use TestKind::*;
        assert!(is_stationary(&report(Adf, true), &report(Kpss, false)));
        assert!(!is_stationary(&report(Adf, false), &report(Kpss, false)));
        assert!(!is_stationary(&report(Adf, true), &report(Kpss, true)));
        assert!(!is_stationary(&report(Adf, false), &report(Kpss, true)));
    }
}
