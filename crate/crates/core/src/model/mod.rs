//! Bistable price model `du = (-m + r u - u^3) dt + sqrt(D) u dW`: its
//! equilibria and folds, Euler-Maruyama paths, and ensemble indicator sweeps.

mod dynamics;
mod ensemble;
mod seed;
mod simulate;

pub use dynamics::{
    bifurcation_diagram, drift, drift_slope, equilibria, fold_points, Branch, BranchPoint,
    EquilibriumSet, Stability, SweepAxis,
};
pub use ensemble::{
    ensemble_indicators, sweep, EnsembleConfig, EnsembleStats, SweepResult, SweepSpec,
    SweptParameter, U0Policy,
};
pub use seed::realization_seed;
pub use simulate::{
    simulate_em, simulate_em_sampled, ModelParams, Path, DEFAULT_EXPLOSION_BOUND,
};
