//! Embedded distribution tables for the unit-root and stationarity tests.

use crate::stats::normal_cdf;

// Response-surface approximation to the Dickey-Fuller tau distribution,
// constant-only regression, one integrated series (MacKinnon 1994).
const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const TAU_SMALLP: [f64; 3] = [2.1659, 1.4412, 0.038269];
const TAU_LARGEP: [f64; 4] = [1.7339, 0.93202, -0.12745, -0.010368];

/// Finite-sample critical values for the constant-only Dickey-Fuller test
/// (MacKinnon 2010): `c0 + c1/T + c2/T^2 + c3/T^3` at 1%, 5% and 10%.
pub const ADF_CRITICAL: [(f64, [f64; 4]); 3] = [
    (0.01, [-3.43035, -6.5393, -16.786, -79.433]),
    (0.05, [-2.86154, -2.8903, -4.234, -40.04]),
    (0.10, [-2.56677, -1.5384, -2.809, 0.0]),
];

/// Level-stationarity KPSS critical values at 10%, 5%, 2.5% and 1%.
pub const KPSS_CRITICAL: [(f64, f64); 4] = [(0.10, 0.347), (0.05, 0.463), (0.025, 0.574), (0.01, 0.739)];

fn polyval(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Asymptotic p-value of a constant-only ADF tau statistic (unclamped).
pub fn adf_pvalue_raw(tau: f64) -> f64 {
    if tau > TAU_MAX {
        return 1.0;
    }
    if tau < TAU_MIN {
        return 0.0;
    }
    let coef: &[f64] = if tau <= TAU_STAR { &TAU_SMALLP } else { &TAU_LARGEP };
    normal_cdf(polyval(coef, tau))
}

/// ADF p-value clamped to `[0.001, 0.999]`.
pub fn adf_pvalue(tau: f64) -> f64 {
    adf_pvalue_raw(tau).clamp(0.001, 0.999)
}

/// Critical value at `level` (one of 0.01, 0.05, 0.10) for `nobs` observations.
pub fn adf_critical_value(level: f64, nobs: usize) -> Option<f64> {
    let t = nobs as f64;
    ADF_CRITICAL
        .iter()
        .find(|(l, _)| (l - level).abs() < 1e-12)
        .map(|(_, c)| c[0] + c[1] / t + c[2] / (t * t) + c[3] / (t * t * t))
}

/// KPSS p-value by linear interpolation in the critical-value table,
/// clamped to `[0.01, 0.10]`.
pub fn kpss_pvalue(stat: f64) -> f64 {
    let first = KPSS_CRITICAL[0];
    let last = KPSS_CRITICAL[KPSS_CRITICAL.len() - 1];
    if stat <= first.1 {
        return first.0;
    }
    if stat >= last.1 {
        return last.0;
    }
    for pair in KPSS_CRITICAL.windows(2) {
        let (p0, c0) = pair[0];
        let (p1, c1) = pair[1];
        if stat <= c1 {
            return p0 + (stat - c0) / (c1 - c0) * (p1 - p0);
        }
    }
    last.0
}
