//! Least-squares regression with classical standard errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub residual_variance: f64,
    pub t_statistics: Vec<f64>,
    pub n_obs: usize,
}

/// Relative pivot size below which a column is treated as linearly dependent.
const RANK_TOL: f64 = 1e-10;

/// Fits `response ~ design` by Householder QR. `design` is row-major; every
/// row must have the same number of columns.
pub fn ols_fit(design: &[Vec<f64>], response: &[f64]) -> Result<OlsFit> {
    let n = design.len();
    if n != response.len() {
        return Err(Error::LengthMismatch { dates: n, values: response.len() });
    }
    let k = design.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::InvalidConfig("design matrix has no columns".into()));
    }
    if n < k + 1 {
        return Err(Error::TooShort { needed: k + 1, got: n });
    }
    if design.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidConfig("ragged design matrix".into()));
    }

    // Column-major working copy, reduced in place to R (upper k x k block).
    let mut a: Vec<Vec<f64>> = (0..k).map(|j| design.iter().map(|row| row[j]).collect()).collect();
    let mut y = response.to_vec();
    let col_scale: Vec<f64> =
        a.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();

    for j in 0..k {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > RANK_TOL * col_scale[j].max(f64::MIN_POSITIVE)) {
            return Err(Error::Singular);
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(j) {
                reflect(&v, vnorm2, &mut col[j..]);
            }
            reflect(&v, vnorm2, &mut y[j..]);
        }
    }

    // Back-substitution R b = Q'y.
    let mut coefficients = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = ((i + 1)..k).map(|j| a[j][i] * coefficients[j]).sum();
        coefficients[i] = (y[i] - s) / a[i][i];
    }
    let ssr: f64 = y[k..].iter().map(|v| v * v).sum();
    let residual_variance = ssr / (n - k) as f64;

    // diag((R'R)^-1) = squared row norms of R^-1.
    let mut rinv = vec![vec![0.0; k]; k];
    #[allow(clippy::needless_range_loop)]
    for c in 0..k {
        for i in (0..=c).rev() {
            let rhs = if i == c { 1.0 } else { 0.0 };
            let s: f64 = ((i + 1)..=c).map(|j| a[j][i] * rinv[j][c]).sum();
            rinv[i][c] = (rhs - s) / a[i][i];
        }
    }
    let standard_errors: Vec<f64> = rinv
        .iter()
        .map(|row| (residual_variance * row.iter().map(|v| v * v).sum::<f64>()).sqrt())
        .collect();
    let t_statistics = coefficients.iter().zip(&standard_errors).map(|(b, s)| b / s).collect();

    Ok(OlsFit { coefficients, standard_errors, residual_variance, t_statistics, n_obs: n })
}

fn reflect(v: &[f64], vnorm2: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= f * vi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit_recovers_coefficients() {
        let beta = [1.5, -2.0, 0.25];
        let design: Vec<Vec<f64>> =
            (0..10).map(|i| vec![1.0, i as f64, ((i * i) % 7) as f64]).collect();
        let y: Vec<f64> =
            design.iter().map(|r| r.iter().zip(&beta).map(|(a, b)| a * b).sum()).collect();
        let fit = ols_fit(&design, &y).unwrap();
        for (c, b) in fit.coefficients.iter().zip(&beta) {
            assert!((c - b).abs() < 1e-12);
        }
        assert!(fit.residual_variance < 1e-25);
    }

    #[test]
    fn intercept_only_is_mean() {
        let y = [2.0, 4.0, 9.0, 1.0];
        let design = vec![vec![1.0]; 4];
        let fit = ols_fit(&design, &y).unwrap();
        assert!((fit.coefficients[0] - 4.0).abs() < 1e-14);
        // se = s / sqrt(n) with s^2 the sample variance
        let s2 = (4.0 + 0.0 + 25.0 + 9.0) / 3.0;
        assert!((fit.standard_errors[0] - (s2 / 4.0f64).sqrt()).abs() < 1e-13);
        assert!((fit.t_statistics[0] - 4.0 / (s2 / 4.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn two_regressor_hand_elimination() {
        // X = [[1,0],[1,1],[1,2],[1,3]], y = [1,2,2,4].
        // X'X = [[4,6],[6,14]], X'y = [9,18]; det = 20.
        // b0 = (14*9 - 6*18)/20 = 0.9, b1 = (4*18 - 6*9)/20 = 0.9.
        // residuals: [0.1, 0.2, -0.7, 0.4], SSR = 0.7, s^2 = 0.35.
        // (X'X)^-1 diag = [14/20, 4/20].
        let design: Vec<Vec<f64>> = (0..4).map(|i| vec![1.0, i as f64]).collect();
        let fit = ols_fit(&design, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!((fit.coefficients[0] - 0.9).abs() < 1e-10);
        assert!((fit.coefficients[1] - 0.9).abs() < 1e-10);
        assert!((fit.residual_variance - 0.35).abs() < 1e-10);
        assert!((fit.standard_errors[0] - (0.35 * 0.7f64).sqrt()).abs() < 1e-10);
        assert!((fit.standard_errors[1] - (0.35 * 0.2f64).sqrt()).abs() < 1e-10);
        for k in 0..2 {
            assert!(
                (fit.t_statistics[k] - fit.coefficients[k] / fit.standard_errors[k]).abs() < 1e-12
            );
        }
    }

    #[test]
    fn rank_deficient_is_singular() {
        let design: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0, i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..6).map(f64::from).collect();
        assert_eq!(ols_fit(&design, &y).unwrap_err(), Error::Singular);
    }

    #[test]
    fn too_few_rows() {
        let design = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        assert!(matches!(ols_fit(&design, &[0.0, 1.0]), Err(Error::TooShort { .. })));
    }
}
