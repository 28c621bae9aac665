use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dynamics::{equilibria, Stability};
use super::seed::realization_seed;
use super::simulate::{simulate_em_sampled, ModelParams, DEFAULT_EXPLOSION_BOUND};
use crate::error::{Error, Result};
use crate::indicators::ar1;
use crate::preprocess::{log_transform, residuals_of, SmootherConfig};
use crate::stats;

/// Largest tolerated share of exploded realizations.
const MAX_EXPLOSION_SHARE: f64 = 0.2;

/// How each realization is turned into one AR1 and one Std value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_realizations: usize,
    /// Model time discarded before indicators are computed.
    pub burn_in: f64,
    /// Model time between retained samples.
    pub sample_interval: f64,
    /// Number of trailing samples of the retained segment the indicators use.
    pub window: usize,
    /// Apply `ln(u + 1)` and Gaussian detrending before the indicators.
    pub detrend: bool,
    pub smoother: SmootherConfig,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_realizations: 100,
            burn_in: 100.0,
            sample_interval: 1.0,
            window: 400,
            detrend: true,
            smoother: SmootherConfig::default(),
        }
    }
}

impl EnsembleConfig {
    fn sample_every(&self, dt: f64) -> Result<usize> {
        let every = (self.sample_interval / dt).round();
        if !(every >= 1.0) || ((every * dt) - self.sample_interval).abs() > 1e-9 * self.sample_interval
        {
            return Err(Error::InvalidConfig(format!(
                "sample interval {} is not a positive multiple of dt {dt}",
                self.sample_interval
            )));
        }
        Ok(every as usize)
    }
}

/// Ensemble means and standard errors of the per-realization indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean_ar1: f64,
    pub mean_std: f64,
    pub stderr_ar1: f64,
    pub stderr_std: f64,
    /// Realizations contributing to the Std mean.
    pub n_used: usize,
    /// Realizations contributing to the AR1 mean (zero-variance ones are skipped).
    pub n_ar1: usize,
    pub n_exploded: usize,
    /// Realizations that fell to a non-positive price and left the log domain.
    pub n_left_domain: usize,
}

enum Outcome {
    Indicators { ar1: Option<f64>, std: f64 },
    Exploded,
    LeftDomain,
}

fn one_realization(p: &ModelParams, cfg: &EnsembleConfig, every: usize) -> Result<Outcome> {
    let path = match simulate_em_sampled(p, every, DEFAULT_EXPLOSION_BOUND) {
        Ok(path) => path,
        Err(Error::Explosion { .. }) => return Ok(Outcome::Exploded),
        Err(e) => return Err(e),
    };
    let first = path.times.iter().position(|t| *t >= cfg.burn_in - 1e-9).unwrap_or(path.times.len());
    let kept = &path.values[first..];
    if kept.len() < cfg.window {
        return Err(Error::TooShort { needed: cfg.window, got: kept.len() });
    }
    let series = if cfg.detrend {
        if kept.iter().any(|u| *u < 0.0) {
            return Ok(Outcome::LeftDomain);
        }
        let logged = log_transform(kept)?;
        residuals_of(&logged, &cfg.smoother)?
    } else {
        kept.to_vec()
    };
    let window = &series[series.len() - cfg.window..];
    let std = stats::sample_std(window);
    Ok(Outcome::Indicators { ar1: ar1(window).ok(), std })
}

fn mean_and_stderr(x: &[f64]) -> (f64, f64) {
    match x.len() {
        0 => (f64::NAN, f64::NAN),
        1 => (x[0], f64::NAN),
        n => {
            let (m, s) = stats::mean_std(x);
            (m, s / (n as f64).sqrt())
        }
    }
}

fn run_ensemble(
    p: &ModelParams,
    cfg: &EnsembleConfig,
    seed_of: impl Fn(usize) -> u64 + Sync,
) -> Result<EnsembleStats> {
    p.validate()?;
    cfg.smoother.validate()?;
    if cfg.n_realizations == 0 {
        return Err(Error::InvalidConfig("need at least one realization".into()));
    }
    if cfg.window < 3 {
        return Err(Error::InvalidConfig("indicator window must be at least 3 samples".into()));
    }
    if p.t_max - cfg.burn_in < (cfg.window - 1) as f64 * cfg.sample_interval {
        return Err(Error::InvalidConfig(format!(
            "t_max - burn_in = {} does not span a {}-sample window",
            p.t_max - cfg.burn_in,
            cfg.window
        )));
    }
    let every = cfg.sample_every(p.dt)?;
    let outcomes: Vec<Outcome> = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|k| one_realization(&ModelParams { seed: seed_of(k), ..*p }, cfg, every))
        .collect::<Result<_>>()?;

    let mut ar1s = Vec::new();
    let mut stds = Vec::new();
    let (mut n_exploded, mut n_left_domain) = (0, 0);
    for o in outcomes {
        match o {
            Outcome::Indicators { ar1, std } => {
                stds.push(std);
                ar1s.extend(ar1);
            }
            Outcome::Exploded => n_exploded += 1,
            Outcome::LeftDomain => n_left_domain += 1,
        }
    }
    if n_exploded as f64 > MAX_EXPLOSION_SHARE * cfg.n_realizations as f64 {
        return Err(Error::EnsembleFailed { failed: n_exploded, total: cfg.n_realizations });
    }
    let (mean_ar1, stderr_ar1) = mean_and_stderr(&ar1s);
    let (mean_std, stderr_std) = mean_and_stderr(&stds);
    Ok(EnsembleStats {
        mean_ar1,
        mean_std,
        stderr_ar1,
        stderr_std,
        n_used: stds.len(),
        n_ar1: ar1s.len(),
        n_exploded,
        n_left_domain,
    })
}

/// Simulates `cfg.n_realizations` paths (seeds derived from `p.seed`) and
/// averages one AR1 and one Std per path over the trailing window of the
/// post-burn-in segment.
pub fn ensemble_indicators(p: &ModelParams, cfg: &EnsembleConfig) -> Result<EnsembleStats> {
    run_ensemble(p, cfg, |k| realization_seed(p.seed, 0, k as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweptParameter {
    #[serde(rename = "m")]
    M,
    #[serde(rename = "r")]
    R,
    #[serde(rename = "D")]
    D,
}

impl SweptParameter {
    fn apply(self, base: &ModelParams, value: f64) -> ModelParams {
        match self {
            Self::M => ModelParams { m: value, ..*base },
            Self::R => ModelParams { r: value, ..*base },
            Self::D => ModelParams { d: value, ..*base },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::M => "m",
            Self::R => "r",
            Self::D => "D",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum U0Policy {
    /// Start every realization on the highest stable equilibrium.
    #[default]
    UpperStable,
    /// Use `base.u0` unchanged.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweptParameter,
    pub grid: Vec<f64>,
    /// Fixed parameters; `base.seed` is the master seed.
    pub base: ModelParams,
    pub ensemble: EnsembleConfig,
    pub u0_policy: U0Policy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: SweptParameter,
    pub grid: Vec<f64>,
    pub mean_ar1: Vec<f64>,
    pub mean_std: Vec<f64>,
    pub stderr_ar1: Vec<f64>,
    pub stderr_std: Vec<f64>,
    pub points: Vec<EnsembleStats>,
}

fn upper_stable(m: f64, r: f64) -> Option<f64> {
    let eq = equilibria(m, r);
    eq.roots
        .iter()
        .zip(&eq.stability)
        .rev()
        .find(|(_, s)| **s == Stability::Stable)
        .map(|(u, _)| *u)
}

/// Ensemble indicators at every grid point; seeds depend only on the master
/// seed, the grid index and the realization index.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.grid.is_empty() {
        return Err(Error::InvalidConfig("empty sweep grid".into()));
    }
    let points: Vec<EnsembleStats> = spec
        .grid
        .iter()
        .enumerate()
        .map(|(g, &value)| {
            let mut p = spec.parameter.apply(&spec.base, value);
            if spec.u0_policy == U0Policy::UpperStable {
                p.u0 = upper_stable(p.m, p.r).ok_or_else(|| {
                    Error::InvalidConfig(format!("no stable equilibrium at {} = {value}", spec.parameter.name()))
                })?;
            }
            run_ensemble(&p, &spec.ensemble, |k| realization_seed(spec.base.seed, g as u64, k as u64))
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        parameter: spec.parameter,
        grid: spec.grid.clone(),
        mean_ar1: points.iter().map(|s| s.mean_ar1).collect(),
        mean_std: points.iter().map(|s| s.mean_std).collect(),
        stderr_ar1: points.iter().map(|s| s.stderr_ar1).collect(),
        stderr_std: points.iter().map(|s| s.stderr_std).collect(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> EnsembleConfig {
        EnsembleConfig { n_realizations: 16, burn_in: 20.0, window: 200, ..EnsembleConfig::default() }
    }

    fn base() -> ModelParams {
        ModelParams { m: 1.0, r: 3.0, d: 0.01, dt: 0.01, t_max: 240.0, u0: 1.532, seed: 5 }
    }

    #[test]
    fn zero_noise_gives_zero_std() {
        let s = ensemble_indicators(&ModelParams { d: 0.0, ..base() }, &small_cfg()).unwrap();
        assert!(s.mean_std < 1e-12, "{}", s.mean_std);
        assert_eq!(s.n_used, 16);
    }

    #[test]
    fn more_noise_more_std() {
        let lo = ensemble_indicators(&base(), &small_cfg()).unwrap();
        let hi = ensemble_indicators(&ModelParams { d: 0.16, ..base() }, &small_cfg()).unwrap();
        assert!(hi.mean_std > lo.mean_std);
    }

    #[test]
    fn closer_to_fold_raises_both_indicators() {
        let cfg = EnsembleConfig { n_realizations: 32, sample_interval: 0.5, ..small_cfg() };
        let far = ensemble_indicators(&ModelParams { m: 1.0, u0: 1.532, ..base() }, &cfg).unwrap();
        let u_near = upper_stable(1.9, 3.0).unwrap();
        let near = ensemble_indicators(&ModelParams { m: 1.9, u0: u_near, ..base() }, &cfg).unwrap();
        assert!(near.mean_ar1 > far.mean_ar1, "{} vs {}", near.mean_ar1, far.mean_ar1);
        assert!(near.mean_std > far.mean_std);
    }

    #[test]
    fn window_must_fit() {
        let cfg = EnsembleConfig { window: 500, ..small_cfg() };
        assert!(matches!(ensemble_indicators(&base(), &cfg), Err(Error::InvalidConfig(_))));
        let cfg = EnsembleConfig { sample_interval: 0.015, ..small_cfg() };
        assert!(ensemble_indicators(&base(), &cfg).is_err());
    }

    #[test]
    fn explosions_fail_the_ensemble() {
        let p = ModelParams { dt: 0.5, u0: 4.0, d: 0.0, ..base() };
        let cfg = EnsembleConfig { sample_interval: 0.5, ..small_cfg() };
        assert!(matches!(ensemble_indicators(&p, &cfg), Err(Error::EnsembleFailed { failed: 16, total: 16 })));
    }

    #[test]
    fn sweep_is_deterministic_and_shaped() {
        let spec = SweepSpec {
            parameter: SweptParameter::D,
            grid: vec![0.01, 0.05],
            base: base(),
            ensemble: EnsembleConfig { n_realizations: 4, ..small_cfg() },
            u0_policy: U0Policy::UpperStable,
        };
        let a = sweep(&spec).unwrap();
        let b = sweep(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean_std.len(), 2);
        assert_eq!(a.stderr_ar1.len(), 2);
        let single = SweepSpec { grid: vec![0.02], ..spec.clone() };
        assert_eq!(sweep(&single).unwrap().grid, vec![0.02]);
        assert!(sweep(&SweepSpec { grid: vec![], ..spec }).is_err());
    }

    #[test]
    fn sweep_independent_of_thread_count() {
        let spec = SweepSpec {
            parameter: SweptParameter::M,
            grid: vec![0.5, 1.5],
            base: base(),
            ensemble: EnsembleConfig { n_realizations: 8, ..small_cfg() },
            u0_policy: U0Policy::UpperStable,
        };
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = serial.install(|| sweep(&spec)).unwrap();
        let b = wide.install(|| sweep(&spec)).unwrap();
        assert_eq!(a, b);
    }
}
