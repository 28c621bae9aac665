use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dynamics::drift;
use crate::error::{Error, Result};

pub const DEFAULT_EXPLOSION_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Migration rate.
    pub m: f64,
    /// Growth rate.
    pub r: f64,
    /// Noise strength.
    #[serde(rename = "D")]
    pub d: f64,
    pub dt: f64,
    pub t_max: f64,
    pub u0: f64,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { m: 1.0, r: 3.0, d: 0.01, dt: 1e-2, t_max: 500.0, u0: 1.5, seed: 0 }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.m, self.r, self.d, self.dt, self.t_max, self.u0];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("model parameters must be finite".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.t_max < self.dt {
            return Err(Error::InvalidConfig(format!(
                "t_max ({}) must be at least dt ({})",
                self.t_max, self.dt
            )));
        }
        if self.d < 0.0 {
            return Err(Error::InvalidConfig(format!("D must be non-negative, got {}", self.d)));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub params: ModelParams,
}

/// Runs `steps` Euler-Maruyama steps, handing `(step, u)` to `visit` for the
/// initial state and after every step.
fn integrate(p: &ModelParams, bound: f64, mut visit: impl FnMut(usize, f64)) -> Result<()> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let noise_scale = p.d.sqrt() * p.dt.sqrt();
    let mut u = p.u0;
    visit(0, u);
    for k in 1..=p.steps() {
        let xi: f64 = StandardNormal.sample(&mut rng);
        u += drift(u, p.m, p.r) * p.dt + noise_scale * u * xi;
        if !u.is_finite() || u.abs() > bound {
            return Err(Error::Explosion { step: k, value: u });
        }
        visit(k, u);
    }
    Ok(())
}

/// Itô Euler-Maruyama path of the model, recorded at every step.
pub fn simulate_em(p: &ModelParams) -> Result<Path> {
    simulate_em_sampled(p, 1, DEFAULT_EXPLOSION_BOUND)
}

/// Same integration as [`simulate_em`], keeping every `every`-th step.
pub fn simulate_em_sampled(p: &ModelParams, every: usize, bound: f64) -> Result<Path> {
    p.validate()?;
    let every = every.max(1);
    let mut times = Vec::with_capacity(p.steps() / every + 1);
    let mut values = Vec::with_capacity(p.steps() / every + 1);
    integrate(p, bound, |k, u| {
        if k % every == 0 {
            times.push(k as f64 * p.dt);
            values.push(u);
        }
    })?;
    Ok(Path { times, values, params: *p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::equilibria;

    fn params() -> ModelParams {
        ModelParams { m: 0.5, r: 3.0, d: 0.01, dt: 0.01, t_max: 20.0, u0: 2.0, seed: 11 }
    }

    #[test]
    fn deterministic_path_converges_to_upper_state() {
        let p = ModelParams { d: 0.0, ..params() };
        let path = simulate_em(&p).unwrap();
        let upper = *equilibria(0.5, 3.0).roots.last().unwrap();
        assert!((path.values.last().unwrap() - upper).abs() < 1e-6);
        assert!((upper - 1.641_783_5).abs() < 1e-7);
        assert_eq!(path.times[0], 0.0);
        assert_eq!(path.times.len(), 2001);
        assert!((path.times[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_stays_put() {
        // u0 = 0 is an exact equilibrium when m = 0.
        let p = ModelParams { m: 0.0, d: 0.0, u0: 0.0, ..params() };
        let path = simulate_em(&p).unwrap();
        assert!(path.values.iter().all(|v| *v == 0.0));
        let p = ModelParams { m: 0.0, d: 0.05, u0: 0.0, ..params() };
        assert!(simulate_em(&p).unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn seeding_contract() {
        let a = simulate_em(&params()).unwrap();
        let b = simulate_em(&params()).unwrap();
        assert_eq!(a, b);
        let c = simulate_em(&ModelParams { seed: 12, ..params() }).unwrap();
        assert_eq!(a.values[0], c.values[0]);
        assert_ne!(a.values[1], c.values[1]);
    }

    #[test]
    fn sampling_keeps_every_kth_step() {
        let full = simulate_em(&params()).unwrap();
        let thin = simulate_em_sampled(&params(), 10, DEFAULT_EXPLOSION_BOUND).unwrap();
        assert_eq!(thin.values.len(), 201);
        for (i, v) in thin.values.iter().enumerate() {
            assert_eq!(*v, full.values[i * 10]);
        }
    }

    #[test]
    fn explosion_is_reported() {
        // Large dt on the cubic drift overshoots and diverges.
        let p = ModelParams { dt: 1.0, t_max: 50.0, u0: 5.0, d: 0.0, ..params() };
        match simulate_em(&p) {
            Err(Error::Explosion { step, .. }) => assert!(step >= 1),
            other => panic!("expected explosion, got {other:?}"),
        }
    }

    #[test]
    fn invalid_params() {
        assert!(simulate_em(&ModelParams { dt: 0.0, ..params() }).is_err());
        assert!(simulate_em(&ModelParams { d: -1.0, ..params() }).is_err());
        assert!(simulate_em(&ModelParams { t_max: 0.001, ..params() }).is_err());
        assert!(simulate_em(&ModelParams { m: f64::NAN, ..params() }).is_err());
    }

    #[test]
    fn crossing_zero_stays_finite() {
        // Strong noise from a small positive start regularly crosses zero.
        for seed in 0..1000 {
            let p = ModelParams {
                m: 0.5,
                r: 3.0,
                d: 0.5,
                dt: 0.01,
                t_max: 5.0,
                u0: 0.3,
                seed,
            };
            let path = simulate_em(&p).unwrap();
            assert!(path.values.iter().all(|v| v.is_finite()));
        }
    }
}
