//! File-producing wrappers around the model: single paths, ensemble sweeps
//! and bifurcation diagrams.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use slowdown_core::model::{
    bifurcation_diagram, equilibria, simulate_em_sampled, sweep, BranchPoint, ModelParams, Stability,
    SweepAxis, SweepResult, SweepSpec, DEFAULT_EXPLOSION_BOUND,
};
use slowdown_core::stats;

use crate::analyze::SCHEMA_VERSION;
use crate::config::{Format, sha256_hex};
use crate::error::{PipelineError, Result};
use crate::report::{csv_string, to_json, write_file};
use crate::svg::{Figure, Mark, Panel, Series, XAxis};

fn short_hash<T: Serialize>(value: &T) -> String {
    sha256_hex(&serde_json::to_vec(value).expect("serializable"))[..12].to_owned()
}

/// Highest stable equilibrium of the deterministic model, the default start.
pub fn upper_stable_equilibrium(m: f64, r: f64) -> Option<f64> {
    let eq = equilibria(m, r);
    eq.roots.iter().zip(&eq.stability).rev().find(|(_, s)| **s == Stability::Stable).map(|(u, _)| *u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub schema_version: u32,
    pub params: ModelParams,
    /// Integration steps between recorded points.
    pub record_every: usize,
    pub n_points: usize,
    pub final_value: f64,
    /// Mean and sample std over the last quarter of the recorded path.
    pub tail_mean: f64,
    pub tail_std: f64,
    pub min: f64,
    pub max: f64,
}

fn write_outputs(
    out_dir: &Path,
    stem: &str,
    formats: &[Format],
    json: impl FnOnce() -> String,
    csv: impl FnOnce() -> String,
    svg: impl FnOnce() -> String,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |ext: &str, contents: String| -> Result<()> {
        let path = out_dir.join(format!("{stem}.{ext}"));
        write_file(&path, contents)?;
        written.push(path);
        Ok(())
    };
    if formats.contains(&Format::Json) {
        put("json", json())?;
    }
    if formats.contains(&Format::Csv) {
        put("csv", csv())?;
    }
    if formats.contains(&Format::Svg) {
        put("svg", svg())?;
    }
    Ok(written)
}

/// One Euler-Maruyama path written as `simulate_<hash>.{csv,svg,json}`.
pub fn run_simulate(
    params: &ModelParams,
    record_every: usize,
    formats: &[Format],
    out_dir: &Path,
) -> Result<(SimulateSummary, Vec<PathBuf>)> {
    let path = simulate_em_sampled(params, record_every, DEFAULT_EXPLOSION_BOUND)?;
    let tail = &path.values[path.values.len() - (path.values.len() / 4).max(1)..];
    let (tail_mean, tail_std) = stats::mean_std(tail);
    let summary = SimulateSummary {
        schema_version: SCHEMA_VERSION,
        params: *params,
        record_every: record_every.max(1),
        n_points: path.values.len(),
        final_value: *path.values.last().expect("path includes u0"),
        tail_mean,
        tail_std,
        min: path.values.iter().copied().fold(f64::INFINITY, f64::min),
        max: path.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    let stem = format!("simulate_{}", short_hash(&(params, record_every)));
    let written = write_outputs(
        out_dir,
        &stem,
        formats,
        || to_json(&summary),
        || {
            let rows = path.times.iter().zip(&path.values).map(|(t, u)| vec![t.to_string(), u.to_string()]);
            csv_string(&["t", "u"], rows)
        },
        || {
            let eq = equilibria(params.m, params.r);
            Figure {
                title: format!("m = {}, r = {}, D = {}, seed = {}", params.m, params.r, params.d, params.seed),
                x_axis: XAxis::Number,
                x_label: "t".into(),
                panels: vec![Panel {
                    y_label: "u".into(),
                    series: vec![Series::line("u(t)", path.times.clone(), path.values.clone())],
                    hlines: eq
                        .roots
                        .iter()
                        .zip(&eq.stability)
                        .map(|(u, s)| (*u, format!("{s:?} {u:.4}").to_lowercase()))
                        .collect(),
                    shaded: false,
                }],
                bands: vec![],
            }
            .render()
        },
    )?;
    Ok((summary, written))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub schema_version: u32,
    pub spec: SweepSpec,
    pub result: SweepResult,
}

/// Ensemble sweep written as `sweep_<param>_<hash>.{csv,svg,json}`.
pub fn run_sweep(spec: &SweepSpec, formats: &[Format], out_dir: &Path) -> Result<(SweepResult, Vec<PathBuf>)> {
    let result = sweep(spec)?;
    let name = spec.parameter.name();
    let stem = format!("sweep_{name}_{}", short_hash(spec));
    let output = SweepOutput { schema_version: SCHEMA_VERSION, spec: spec.clone(), result };
    let r = &output.result;
    let written = write_outputs(
        out_dir,
        &stem,
        formats,
        || to_json(&output),
        || {
            let rows = r.grid.iter().zip(&r.points).map(|(v, p)| {
                vec![
                    v.to_string(),
                    p.mean_ar1.to_string(),
                    p.stderr_ar1.to_string(),
                    p.mean_std.to_string(),
                    p.stderr_std.to_string(),
                    p.n_used.to_string(),
                    p.n_ar1.to_string(),
                    p.n_exploded.to_string(),
                    p.n_left_domain.to_string(),
                ]
            });
            csv_string(
                &[name, "mean_ar1", "stderr_ar1", "mean_std", "stderr_std", "n_used", "n_ar1", "n_exploded", "n_left_domain"],
                rows,
            )
        },
        || {
            let panel = |label: &str, mean: &[f64], err: &[f64]| Panel {
                y_label: label.into(),
                series: vec![Series::points(format!("mean {label} ± 1 s.e."), r.grid.clone(), mean.to_vec())
                    .with_errors(err.to_vec())],
                hlines: vec![],
                shaded: false,
            };
            Figure {
                title: format!("Ensemble indicators against {name}"),
                x_axis: XAxis::Number,
                x_label: name.into(),
                panels: vec![panel("AR1", &r.mean_ar1, &r.stderr_ar1), panel("Std", &r.mean_std, &r.stderr_std)],
                bands: vec![],
            }
            .render()
        },
    )?;
    Ok((output.result, written))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationOutput {
    pub schema_version: u32,
    pub axis: SweepAxis,
    pub fold_points: Vec<(f64, f64)>,
    pub points: Vec<BranchPoint>,
}

/// Equilibrium branches written as `bifurcation_<hash>.{csv,svg,json}`.
pub fn run_bifurcation(
    axis: SweepAxis,
    grid: &[f64],
    formats: &[Format],
    out_dir: &Path,
) -> Result<(BifurcationOutput, Vec<PathBuf>)> {
    if grid.is_empty() {
        return Err(PipelineError::Config("empty grid".into()));
    }
    let fold_points = match axis {
        SweepAxis::M { r } => slowdown_core::model::fold_points(r),
        SweepAxis::R { .. } => Vec::new(),
    };
    let output =
        BifurcationOutput { schema_version: SCHEMA_VERSION, axis, fold_points, points: bifurcation_diagram(axis, grid) };
    let (x_name, title) = match axis {
        SweepAxis::M { r } => ("m", format!("Equilibria against m (r = {r})")),
        SweepAxis::R { m } => ("r", format!("Equilibria against r (m = {m})")),
    };
    let stem = format!("bifurcation_{}", short_hash(&(axis, grid)));
    let written = write_outputs(
        out_dir,
        &stem,
        formats,
        || to_json(&output),
        || {
            let rows = output.points.iter().map(|p| {
                vec![
                    p.parameter.to_string(),
                    p.root.to_string(),
                    format!("{:?}", p.stability).to_lowercase(),
                    format!("{:?}", p.branch).to_lowercase(),
                ]
            });
            csv_string(&[x_name, "u", "stability", "branch"], rows)
        },
        || {
            let series = [Stability::Stable, Stability::Unstable, Stability::Fold].into_iter().map(|s| {
                let (xs, ys) = output.points.iter().filter(|p| p.stability == s).map(|p| (p.parameter, p.root)).unzip();
                Series { mark: Mark::Points, ..Series::line(format!("{s:?}").to_lowercase(), xs, ys) }
            });
            Figure {
                title,
                x_axis: XAxis::Number,
                x_label: x_name.into(),
                panels: vec![Panel { y_label: "u*".into(), series: series.collect(), hlines: vec![], shaded: false }],
                bands: vec![],
            }
            .render()
        },
    )?;
    Ok((output, written))
}
