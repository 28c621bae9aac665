//! Integrator accuracy and symmetries of the model.

use slowdown_core::model::{equilibria, simulate_em, simulate_em_sampled, ModelParams, DEFAULT_EXPLOSION_BOUND};
use slowdown_core::stats::mean_std;

fn params() -> ModelParams {
    ModelParams { m: 0.7, r: 3.0, d: 0.02, dt: 0.01, t_max: 50.0, u0: 0.9, seed: 99 }
}

#[test]
fn mirrored_parameters_mirror_the_path_exactly() {
    for seed in 0..20 {
        let p = ModelParams { seed, ..params() };
        let q = ModelParams { m: -p.m, u0: -p.u0, ..p };
        let (a, b) = (simulate_em(&p).unwrap(), simulate_em(&q).unwrap());
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| *x == -*y), "seed {seed}");
    }
}

fn rk4(p: &ModelParams, h: f64) -> f64 {
    let f = |u: f64| -p.m + p.r * u - u * u * u;
    let mut u = p.u0;
    for _ in 0..(p.t_max / h).round() as usize {
        let k1 = f(u);
        let k2 = f(u + 0.5 * h * k1);
        let k3 = f(u + 0.5 * h * k2);
        let k4 = f(u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    u
}

#[test]
fn noiseless_scheme_is_first_order() {
    // Transient regime, before the path locks onto the equilibrium.
    let base = ModelParams { d: 0.0, t_max: 1.0, u0: 0.2, ..params() };
    let exact = rk4(&base, 1e-5);
    let err = |dt: f64| {
        let p = ModelParams { dt, ..base };
        (simulate_em(&p).unwrap().values.last().unwrap() - exact).abs()
    };
    let (e1, e2, e3) = (err(0.02), err(0.01), err(0.005));
    for ratio in [e1 / e2, e2 / e3] {
        assert!((1.7..2.3).contains(&ratio), "{e1:e} {e2:e} {e3:e}");
    }
}

#[test]
fn stationary_variance_matches_linearization() {
    // Near u* = sqrt(3) (m = 0, r = 3) the model is an OU process with rate
    // 6 and noise sqrt(D) u*; the Euler scheme's stationary variance is
    // D u*^2 / (2|λ| - λ^2 dt).
    let ustar = equilibria(0.0, 3.0).roots[2];
    assert!((ustar - 3f64.sqrt()).abs() < 1e-12);
    let lambda: f64 = 3.0 - 3.0 * ustar * ustar;
    let d = 0.01;
    for dt in [0.01, 0.002] {
        let p = ModelParams { m: 0.0, r: 3.0, d, dt, t_max: 20_000.0, u0: ustar, seed: 5 };
        let every = (0.1 / dt).round() as usize;
        let path = simulate_em_sampled(&p, every, DEFAULT_EXPLOSION_BOUND).unwrap();
        let (_, sd) = mean_std(&path.values[100..]);
        let expected = d * ustar * ustar / (2.0 * lambda.abs() - lambda * lambda * dt);
        let rel = sd * sd / expected - 1.0;
        assert!(rel.abs() < 0.04, "dt {dt}: variance {:.6} vs {expected:.6}", sd * sd);
    }
}
