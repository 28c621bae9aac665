use serde::{Deserialize, Serialize};

/// Deterministic right-hand side `-m + r u - u^3`.
pub fn drift(u: f64, m: f64, r: f64) -> f64 {
    -m + r * u - u * u * u
}

/// `d drift / du = r - 3 u^2`.
pub fn drift_slope(u: f64, r: f64) -> f64 {
    r - 3.0 * u * u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    /// Degenerate root where the slope vanishes (saddle-node).
    Fold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    /// Distinct real roots, ascending.
    pub roots: Vec<f64>,
    pub stability: Vec<Stability>,
}

/// Slopes with magnitude below this are reported as folds.
const FOLD_SLOPE_TOL: f64 = 1e-9;

fn classify(u: f64, r: f64) -> Stability {
    let s = drift_slope(u, r);
    let scale = r.abs().max(3.0 * u * u).max(1.0);
    if s.abs() <= FOLD_SLOPE_TOL * scale {
        Stability::Fold
    } else if s < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

/// Newton polish of a root of `drift`, accepting only improving steps.
fn polish(mut u: f64, m: f64, r: f64) -> f64 {
    for _ in 0..4 {
        let f = drift(u, m, r);
        let s = drift_slope(u, r);
        if f == 0.0 || s == 0.0 {
            break;
        }
        let next = u - f / s;
        if drift(next, m, r).abs() < f.abs() {
            u = next;
        } else {
            break;
        }
    }
    u
}

/// All real roots of `u^3 - r u + m = 0` with their stability under the drift.
pub fn equilibria(m: f64, r: f64) -> EquilibriumSet {
    // Depressed cubic u^3 + p u + q with p = -r, q = m; discriminant 4r^3 - 27m^2.
    let disc = 4.0 * r * r * r - 27.0 * m * m;
    let mut roots: Vec<f64> = if disc > 0.0 {
        let amp = 2.0 * (r / 3.0).sqrt();
        let arg = ((-3.0 * m / (2.0 * r)) * (3.0 / r).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| amp * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    } else if disc == 0.0 {
        if r == 0.0 {
            vec![0.0]
        } else {
            // simple root 3q/p and double root -3q/(2p)
            vec![-3.0 * m / r, 3.0 * m / (2.0 * r)]
        }
    } else {
        let half_q = m / 2.0;
        let inner = (half_q * half_q - r * r * r / 27.0).sqrt();
        vec![(-half_q + inner).cbrt() + (-half_q - inner).cbrt()]
    };
    for u in &mut roots {
        *u = polish(*u, m, r);
    }
    roots.sort_by(f64::total_cmp);
    let stability = roots.iter().map(|&u| classify(u, r)).collect();
    EquilibriumSet { roots, stability }
}

/// Saddle-node points `(m, u)` where `drift = drift' = 0`, ascending in `m`.
/// Empty for `r <= 0`.
pub fn fold_points(r: f64) -> Vec<(f64, f64)> {
    if !(r > 0.0) {
        return Vec::new();
    }
    let u = (r / 3.0).sqrt();
    let m = r * u - u * u * u;
    vec![(-m, -u), (m, u)]
}

/// Which equilibrium family a root belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// High-price stable state.
    Upper,
    /// Unstable separatrix between the two stable states.
    Middle,
    /// Low-price stable state.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Vary `m` at fixed `r`.
    M { r: f64 },
    /// Vary `r` at fixed `m`.
    R { m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub parameter: f64,
    pub root: f64,
    pub stability: Stability,
    pub branch: Branch,
}

fn branch_of(index: usize, count: usize, root: f64, stability: Stability) -> Branch {
    match (count, stability) {
        (3, _) => [Branch::Lower, Branch::Middle, Branch::Upper][index],
        (_, Stability::Unstable) => Branch::Middle,
        (2, Stability::Fold) => Branch::Middle,
        _ if root >= 0.0 => Branch::Upper,
        _ => Branch::Lower,
    }
}

/// Equilibria across `grid` for the swept parameter.
pub fn bifurcation_diagram(axis: SweepAxis, grid: &[f64]) -> Vec<BranchPoint> {
    grid.iter()
        .flat_map(|&p| {
            let (m, r) = match axis {
                SweepAxis::M { r } => (p, r),
                SweepAxis::R { m } => (m, p),
            };
            let eq = equilibria(m, r);
            let count = eq.roots.len();
            eq.roots
                .into_iter()
                .zip(eq.stability)
                .enumerate()
                .map(move |(i, (root, stability))| BranchPoint {
                    parameter: p,
                    root,
                    stability,
                    branch: branch_of(i, count, root, stability),
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent root oracle: bisection on sign changes over a fine grid.
    fn bisect_roots(m: f64, r: f64) -> Vec<f64> {
        let f = |u: f64| u * u * u - r * u + m;
        let bound = 1.0 + r.abs().max(m.abs());
        let n = 200_000;
        let h = 2.0 * bound / n as f64;
        let mut out = Vec::new();
        for i in 0..n {
            let (mut a, mut b) = (-bound + i as f64 * h, -bound + (i + 1) as f64 * h);
            if f(a) == 0.0 {
                out.push(a);
                continue;
            }
            if f(a).signum() == f(b).signum() {
                continue;
            }
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                if f(a).signum() == f(c).signum() {
                    a = c;
                } else {
                    b = c;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    #[test]
    fn drift_values() {
        assert_eq!(drift(0.0, 0.0, 7.0), 0.0);
        assert_eq!(drift(1.0, 0.5, 3.0), 1.5);
        for &(u, m, r) in &[(0.3, 0.2, 3.0), (-1.7, 1.1, -2.0), (2.5, -0.4, 0.5)] {
            assert_eq!(drift(-u, -m, r), -drift(u, m, r));
        }
    }

    #[test]
    fn symmetric_three_roots() {
        let eq = equilibria(0.0, 3.0);
        let want = [-3f64.sqrt(), 0.0, 3f64.sqrt()];
        assert_eq!(eq.roots.len(), 3);
        for (a, b) in eq.roots.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(eq.stability, vec![Stability::Stable, Stability::Unstable, Stability::Stable]);
    }

    #[test]
    fn single_lower_root_for_large_m() {
        let eq = equilibria(3.0, 3.0);
        let oracle = bisect_roots(3.0, 3.0);
        assert_eq!(oracle.len(), 1);
        assert_eq!(eq.roots.len(), 1);
        assert!((eq.roots[0] - oracle[0]).abs() < 1e-12);
        assert!((eq.roots[0] + 2.1038).abs() < 1e-4);
        assert_eq!(eq.stability, vec![Stability::Stable]);
    }

    #[test]
    fn bistable_configuration() {
        let eq = equilibria(0.5, 3.0);
        let oracle = bisect_roots(0.5, 3.0);
        assert_eq!(eq.roots.len(), 3);
        for (a, b) in eq.roots.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(eq.stability, vec![Stability::Stable, Stability::Unstable, Stability::Stable]);
        assert!((eq.roots[2] - 1.641_783_5).abs() < 1e-7);
    }

    #[test]
    fn exactly_at_fold() {
        let eq = equilibria(2.0, 3.0);
        assert_eq!(eq.roots.len(), 2);
        assert!((eq.roots[0] + 2.0).abs() < 1e-12);
        assert!((eq.roots[1] - 1.0).abs() < 1e-12);
        assert_eq!(eq.stability, vec![Stability::Stable, Stability::Fold]);
        assert_eq!(equilibria(0.0, 0.0).roots, vec![0.0]);
    }

    #[test]
    fn fold_points_closed_form() {
        let f = fold_points(3.0);
        assert_eq!(f.len(), 2);
        assert!((f[0].0 + 2.0).abs() < 1e-12 && (f[0].1 + 1.0).abs() < 1e-12);
        assert!((f[1].0 - 2.0).abs() < 1e-12 && (f[1].1 - 1.0).abs() < 1e-12);
        assert!(fold_points(0.0).is_empty());
        assert!(fold_points(-1.0).is_empty());
        let g = fold_points(0.75);
        assert!((g[1].0 - 0.25).abs() < 1e-12 && (g[1].1 - 0.5).abs() < 1e-12);
        for (m, u) in f.into_iter().chain(g) {
            let r = if m.abs() > 1.0 { 3.0 } else { 0.75 };
            assert!(drift(u, m, r).abs() < 1e-12);
            assert!(drift_slope(u, r).abs() < 1e-12);
        }
    }

    #[test]
    fn root_count_flips_at_fold_in_m() {
        let grid: Vec<f64> = (0..=800).map(|i| -4.0 + i as f64 * 0.01).collect();
        let diagram = bifurcation_diagram(SweepAxis::M { r: 3.0 }, &grid);
        for &m in &grid {
            let count = diagram.iter().filter(|p| p.parameter == m).count();
            if m.abs() < 2.0 - 1e-9 {
                assert_eq!(count, 3, "m = {m}");
            } else if m.abs() > 2.0 + 1e-9 {
                assert_eq!(count, 1, "m = {m}");
            }
        }
        for p in &diagram {
            assert!(drift(p.root, p.parameter, 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn r_sweep_becomes_bistable_beyond_fold() {
        let grid: Vec<f64> = (0..=80).map(|i| -4.0 + i as f64 * 0.1).collect();
        let diagram = bifurcation_diagram(SweepAxis::R { m: 0.5 }, &grid);
        // Fold in r where 4 r^3 = 27 m^2.
        let r_fold = (27.0 * 0.25 / 4.0f64).cbrt();
        for &r in &grid {
            let pts: Vec<_> = diagram.iter().filter(|p| p.parameter == r).collect();
            let want = if r > r_fold { 3 } else { 1 };
            assert_eq!(pts.len(), want, "r = {r}");
            if want == 1 {
                assert_eq!(pts[0].branch, Branch::Lower);
            } else {
                assert_eq!(pts[2].branch, Branch::Upper);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn roots_are_accurate_and_labelled(m in -10.0f64..10.0, r in -10.0f64..10.0) {
            let eq = equilibria(m, r);
            prop_assert!(!eq.roots.is_empty() && eq.roots.len() <= 3);
            for (u, s) in eq.roots.iter().zip(&eq.stability) {
                prop_assert!(drift(*u, m, r).abs() < 1e-10, "f({}) = {}", u, drift(*u, m, r));
                let slope = drift_slope(*u, r);
                match s {
                    Stability::Stable => prop_assert!(slope < 0.0),
                    Stability::Unstable => prop_assert!(slope > 0.0),
                    Stability::Fold => prop_assert!(slope.abs() < 1e-6),
                }
            }
        }
    }

    proptest! {
        #[test]
        fn fold_changes_root_count_by_two(r in 0.05f64..10.0) {
            for (m_fold, _) in fold_points(r) {
                let inside = equilibria(m_fold - 1e-3 * m_fold.signum(), r).roots.len();
                let outside = equilibria(m_fold + 1e-3 * m_fold.signum(), r).roots.len();
                prop_assert_eq!(inside, 3);
                prop_assert_eq!(outside, 1);
            }
        }
    }
}
