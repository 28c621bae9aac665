use super::tables::kpss_pvalue;
use super::{StationarityReport, TestKind};
use crate::error::{Error, Result};
use crate::stats;

const MIN_LEN: usize = 20;

/// `floor(4 * (n/100)^(1/4))`.
pub fn kpss_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Newey-West long-run variance of `e` with Bartlett weights `1 - j/(lags+1)`.
pub fn newey_west_lrv(e: &[f64], lags: usize) -> f64 {
    let n = e.len() as f64;
    let autocov = |j: usize| e[j..].iter().zip(e).map(|(a, b)| a * b).sum::<f64>() / n;
    let mut lrv = autocov(0);
    for j in 1..=lags.min(e.len().saturating_sub(1)) {
        lrv += 2.0 * (1.0 - j as f64 / (lags as f64 + 1.0)) * autocov(j);
    }
    lrv
}

/// KPSS level-stationarity test.
pub fn kpss_test(x: &[f64], lag_truncation: Option<usize>, alpha: f64) -> Result<StationarityReport> {
    let n = x.len();
    if n < MIN_LEN {
        return Err(Error::TooShort { needed: MIN_LEN, got: n });
    }
    let lags = lag_truncation.unwrap_or_else(|| kpss_bandwidth(n));
    if lags >= n {
        return Err(Error::InvalidConfig(format!("lag truncation {lags} >= series length {n}")));
    }
    let mu = stats::mean(x);
    let e: Vec<f64> = x.iter().map(|v| v - mu).collect();
    let lrv = newey_west_lrv(&e, lags);
    if !(lrv > 0.0) {
        return Err(Error::Degenerate("zero long-run variance".into()));
    }
    let eta: f64 = e
        .iter()
        .scan(0.0, |s, v| {
            *s += v;
            Some(*s * *s)
        })
        .sum::<f64>()
        / (n as f64 * n as f64);
    let statistic = eta / lrv;
    let p_value = kpss_pvalue(statistic);
    Ok(StationarityReport {
        test_name: TestKind::Kpss,
        statistic,
        p_value,
        lags_used: lags,
        reject_null: p_value < alpha,
        n_effective: n,
        alpha,
    })
}
