use super::ols::ols_fit;
use super::tables::adf_pvalue;
use super::{StationarityReport, TestKind};
use crate::error::{Error, Result};

/// Minimum regression sample after differencing and lagging.
const MIN_EFFECTIVE: usize = 20;
/// |t| threshold for keeping the last lag (two-sided 10%).
const LAG_T_CRIT: f64 = 1.644_853_626_951_472_2;

/// `floor(12 * (n/100)^(1/4))`.
pub fn schwert_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Builds the ADF regression of `dx[t]` on `[1, x[t-1], dx[t-1..=t-p]]` for
/// `t` from `start` (an index into `dx`).
fn regression(x: &[f64], dx: &[f64], p: usize, start: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    (start..dx.len())
        .map(|t| {
            let mut row = Vec::with_capacity(p + 2);
            row.push(1.0);
            row.push(x[t]);
            row.extend((1..=p).map(|j| dx[t - j]));
            (row, dx[t])
        })
        .unzip()
}

/// Augmented Dickey-Fuller test with a constant and no trend.
///
/// With `max_lag = None` the lag order starts at the Schwert bound and is
/// reduced while the last lag is insignificant at 10%, all candidates fitted
/// on a common sample; the chosen order is then refitted on the full sample.
/// `Some(p)` fixes the order at `p`.
pub fn adf_test(x: &[f64], max_lag: Option<usize>, alpha: f64) -> Result<StationarityReport> {
    if x.len() < MIN_EFFECTIVE + 2 {
        return Err(Error::TooShort { needed: MIN_EFFECTIVE + 2, got: x.len() });
    }
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::Degenerate("constant series".into()));
    }
    // dx[t] = x[t+1] - x[t], regressed on the level x[t].
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let limit = dx.len().saturating_sub(MIN_EFFECTIVE);

    let lags = match max_lag {
        Some(p) => {
            if p > limit {
                return Err(Error::TooShort { needed: p + MIN_EFFECTIVE + 1, got: x.len() });
            }
            p
        }
        None => {
            let pmax = schwert_max_lag(x.len()).min(limit).min((dx.len() - 3) / 2);
            let mut p = pmax;
            while p > 0 {
                let (design, y) = regression(x, &dx, p, pmax);
                let fit = ols_fit(&design, &y)?;
                if fit.t_statistics[p + 1].abs() >= LAG_T_CRIT {
                    break;
                }
                p -= 1;
            }
            p
        }
    };

    let (design, y) = regression(x, &dx, lags, lags);
    let fit = ols_fit(&design, &y).map_err(|e| match e {
        Error::Singular => Error::Degenerate("singular ADF regression".into()),
        other => other,
    })?;
    let statistic = fit.t_statistics[1];
    if !statistic.is_finite() {
        return Err(Error::Degenerate("non-finite ADF statistic".into()));
    }
    let p_value = adf_pvalue(statistic);
    Ok(StationarityReport {
        test_name: TestKind::Adf,
        statistic,
        p_value,
        lags_used: lags,
        reject_null: p_value < alpha,
        n_effective: fit.n_obs,
        alpha,
    })
}
