//! wasm-bindgen surface for the demo page in `www/`.
//!
//! Everything crosses the boundary as numbers and flat `Float64Array`s; each
//! export is a thin shim over a plain function that the native tests drive.

use slowdown_core::indicators::{detect_warnings, rolling_indicators, ThresholdConfig, WindowConfig};
use slowdown_core::model::{bifurcation_diagram, simulate_em_sampled, ModelParams, Stability, SweepAxis};
use slowdown_core::preprocess::{detrend, SmootherConfig};
use slowdown_core::{PriceSeries, ResidualSeries};
use wasm_bindgen::prelude::*;

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

fn stability_code(s: Stability) -> f64 {
    match s {
        Stability::Stable => 0.0,
        Stability::Unstable => 1.0,
        Stability::Fold => 2.0,
    }
}

/// Flat `(m, u, stability)` triples over `n` evenly spaced values of m;
/// stability is 0 stable, 1 unstable, 2 fold.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
pub fn equilibria_over_m(r: f64, m_min: f64, m_max: f64, n: usize) -> Result<Vec<f64>, String> {
    if n < 2 || !(m_max > m_min) {
        return Err("need at least two grid points and m_max > m_min".into());
    }
    let grid: Vec<f64> = (0..n).map(|i| m_min + (m_max - m_min) * i as f64 / (n - 1) as f64).collect();
    Ok(bifurcation_diagram(SweepAxis::M { r }, &grid)
        .into_iter()
        .flat_map(|p| [p.parameter, p.root, stability_code(p.stability)])
        .collect())
}

/// Path values recorded every `every` steps (the first is `u0`).
#[allow(clippy::too_many_arguments)]
pub fn path(m: f64, r: f64, d: f64, dt: f64, t_max: f64, u0: f64, seed: u64, every: usize) -> Result<Vec<f64>, String> {
    let p = ModelParams { m, r, d, dt, t_max, u0, seed };
    simulate_em_sampled(&p, every, 1e6).map(|p| p.values).map_err(|e| e.to_string())
}

/// `ln(1 + x)` minus its Gaussian-smoothed trend.
pub fn detrended(values: &[f64], bandwidth: f64) -> Result<Vec<f64>, String> {
    let cfg = SmootherConfig::new(bandwidth, 3.0).map_err(|e| e.to_string())?;
    let prices = PriceSeries::from_values("demo", values.to_vec()).map_err(|e| e.to_string())?;
    detrend(&prices, &cfg).map(|r| r.values().to_vec()).map_err(|e| e.to_string())
}

/// Rolling indicators over `residuals`: `[ar1..., std...]`, each of length
/// `len - window + 1`.
pub fn indicators(residuals: &[f64], window: usize) -> Result<Vec<f64>, String> {
    let series = ResidualSeries::from_values("demo", residuals.to_vec()).map_err(|e| e.to_string())?;
    let ind = rolling_indicators(&series, WindowConfig::new(window)).map_err(|e| e.to_string())?;
    Ok(ind.ar1.into_iter().chain(ind.std).collect())
}

/// Warning events as flat `(start_index, end_index)` pairs into `residuals`.
pub fn warnings(residuals: &[f64], window: usize, delta: usize, theta_multiplier: f64) -> Result<Vec<f64>, String> {
    let series = ResidualSeries::from_values("demo", residuals.to_vec()).map_err(|e| e.to_string())?;
    let ind = rolling_indicators(&series, WindowConfig::new(window)).map_err(|e| e.to_string())?;
    let cfg = ThresholdConfig { delta_days: delta, theta_multiplier, ..ThresholdConfig::default() };
    let events = detect_warnings(&series, &ind, &cfg).map_err(|e| e.to_string())?;
    let origin = series.dates()[0];
    Ok(events
        .iter()
        .flat_map(|e| [(e.start_date - origin).num_days() as f64, (e.end_date - origin).num_days() as f64])
        .collect())
}

#[wasm_bindgen(js_name = equilibriaOverM)]
pub fn equilibria_over_m_js(r: f64, m_min: f64, m_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    js(equilibria_over_m(r, m_min, m_max, n))
}

#[wasm_bindgen(js_name = simulatePath)]
#[allow(clippy::too_many_arguments)]
pub fn path_js(m: f64, r: f64, d: f64, dt: f64, t_max: f64, u0: f64, seed: u32, every: usize) -> Result<Vec<f64>, JsError> {
    js(path(m, r, d, dt, t_max, u0, seed as u64, every))
}

#[wasm_bindgen(js_name = detrend)]
pub fn detrended_js(values: &[f64], bandwidth: f64) -> Result<Vec<f64>, JsError> {
    js(detrended(values, bandwidth))
}

#[wasm_bindgen(js_name = rollingIndicators)]
pub fn indicators_js(residuals: &[f64], window: usize) -> Result<Vec<f64>, JsError> {
    js(indicators(residuals, window))
}

#[wasm_bindgen(js_name = warningEvents)]
pub fn warnings_js(residuals: &[f64], window: usize, delta: usize, theta_multiplier: f64) -> Result<Vec<f64>, JsError> {
    js(warnings(residuals, window, delta, theta_multiplier))
}
