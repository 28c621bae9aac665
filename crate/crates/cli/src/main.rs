use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use slowdown_cli::analyze::{run_analyze, AssetStatus};
use slowdown_cli::config::{AnalysisConfig, AnalysisSettings, Format};
use slowdown_cli::fetch::{fetch_remote, FetchConfig, ENV_API_BASE, ENV_API_KEY, ENV_CACHE_DIR};
use slowdown_cli::load::{to_csv, GapPolicy};
use slowdown_cli::model::{run_bifurcation, run_simulate, run_sweep, upper_stable_equilibrium};
use slowdown_cli::report::emit_report;
use slowdown_core::indicators::{DeltaMode, ThresholdConfig};
use slowdown_core::model::{EnsembleConfig, ModelParams, SweepAxis, SweepSpec, SweptParameter, U0Policy};
use slowdown_core::preprocess::SmootherConfig;

#[derive(Parser)]
#[command(name = "slowdown", version, about = "Early-warning indicators for price series and a bistable price model")]
struct Cli {
    /// Worker threads; 1 runs everything sequentially. Defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detrend, test and compute indicators and warnings for price files.
    Analyze(AnalyzeArgs),
    /// Simulate one path of the model.
    Simulate(SimulateArgs),
    /// Ensemble indicator means across a parameter grid.
    Sweep(SweepArgs),
    /// Equilibria and their stability across a parameter grid.
    Bifurcation(BifurcationArgs),
    /// Download daily closes into a `date,close` file.
    Fetch(FetchArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// TOML (or .json) configuration; replaces the analysis flags below.
    #[arg(long, conflicts_with_all = ["assets", "from", "to"])]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    assets: Vec<String>,
    #[arg(long, required_unless_present = "config")]
    from: Option<NaiveDate>,
    #[arg(long, required_unless_present = "config")]
    to: Option<NaiveDate>,
    #[arg(long, default_value_t = 30.0)]
    bandwidth: f64,
    /// Kernel truncation in bandwidths.
    #[arg(long, default_value_t = 3.0)]
    truncation: f64,
    #[arg(long, value_delimiter = ',', default_value = "410,60")]
    windows: Vec<usize>,
    /// Window used for warnings; the smallest window by default.
    #[arg(long)]
    warning_window: Option<usize>,
    #[arg(long, default_value_t = 20)]
    delta: usize,
    #[arg(long, default_value_t = 1.0)]
    theta_mult: f64,
    #[arg(long, value_enum, default_value_t = DeltaArg::Rolling)]
    delta_mode: DeltaArg,
    #[arg(long, default_value_t = 3)]
    merge_gap: i64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Fill gaps of up to 3 days with the previous close.
    #[arg(long)]
    forward_fill: bool,
    /// Directory holding `<ASSET>.csv` files.
    #[arg(long, default_value = "data/synthetic")]
    data_dir: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    remote: RemoteArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeltaArg {
    Rolling,
    Block,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "json,csv,svg")]
    format: Vec<Format>,
}

#[derive(Args)]
struct RemoteArgs {
    /// Price API base URL, used for assets without a local file.
    #[arg(long, env = ENV_API_BASE)]
    api_base: Option<String>,
    #[arg(long, env = ENV_API_KEY, hide_env_values = true)]
    api_key: Option<String>,
    #[arg(long, env = ENV_CACHE_DIR)]
    cache_dir: Option<PathBuf>,
}

impl RemoteArgs {
    fn config(&self) -> Option<FetchConfig> {
        let mut cfg = FetchConfig::new(self.api_base.clone().filter(|s| !s.is_empty())?);
        cfg.api_key = self.api_key.clone().filter(|s| !s.is_empty());
        cfg.cache_dir = self.cache_dir.clone();
        Some(cfg)
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    m: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    r: f64,
    #[arg(long = "D", default_value_t = 0.01)]
    d: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 500.0)]
    tmax: f64,
    /// Initial state; the highest stable equilibrium by default.
    #[arg(long, allow_negative_numbers = true)]
    u0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        let u0 = match self.u0 {
            Some(u) => u,
            None => upper_stable_equilibrium(self.m, self.r)
                .with_context(|| format!("no stable equilibrium at m = {}, r = {}; pass --u0", self.m, self.r))?,
        };
        Ok(ModelParams { m: self.m, r: self.r, d: self.d, dt: self.dt, t_max: self.tmax, u0, seed: self.seed })
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Record every k-th integration step.
    #[arg(long, default_value_t = 100)]
    record_every: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    M,
    R,
    #[value(name = "D")]
    D,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    param: ParamArg,
    /// `start:end:count`, evenly spaced and inclusive.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    #[arg(long, default_value_t = 100.0)]
    burn_in: f64,
    #[arg(long, default_value_t = 1.0)]
    sample_interval: f64,
    /// Trailing samples used for each realization's indicators.
    #[arg(long, default_value_t = 400)]
    window: usize,
    /// Use raw states instead of detrended log residuals.
    #[arg(long)]
    no_detrend: bool,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    M,
    R,
}

#[derive(Args)]
struct BifurcationArgs {
    #[arg(long, value_enum, default_value_t = AxisArg::M)]
    axis: AxisArg,
    /// Value of the other parameter (r for an m axis, m for an r axis).
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    fixed: f64,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-4:4:801")]
    grid: Grid,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FetchArgs {
    #[arg(long)]
    asset: String,
    #[arg(long)]
    from: NaiveDate,
    #[arg(long)]
    to: NaiveDate,
    /// Output file; `<data-dir>/<ASSET>.csv` by default.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    #[command(flatten)]
    remote: RemoteArgs,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(format!("expected start:end:count, got `{s}`")) };
    let a: f64 = a.trim().parse().map_err(|e| format!("bad start `{a}`: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad end `{b}`: {e}"))?;
    let n: usize = n.trim().parse().map_err(|e| format!("bad count `{n}`: {e}"))?;
    match n {
        0 => Err("grid count must be at least 1".into()),
        1 => Ok(Grid(vec![a])),
        _ => Ok(Grid((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())),
    }
}

fn analyze(args: AnalyzeArgs) -> Result<i32> {
    let (settings, data_dir, out, formats) = match &args.config {
        Some(path) => {
            let cfg = AnalysisConfig::from_file(path)?;
            (cfg.analysis, cfg.output.data_dir, cfg.output.out_dir, cfg.output.formats)
        }
        None => {
            let settings = AnalysisSettings {
                assets: args.assets.clone(),
                from: args.from.expect("required by clap"),
                to: args.to.expect("required by clap"),
                smoother: SmootherConfig::new(args.bandwidth, args.truncation)?,
                windows: args.windows.clone(),
                warning_window: args.warning_window,
                threshold: ThresholdConfig {
                    delta_days: args.delta,
                    theta_multiplier: args.theta_mult,
                    merge_gap_days: args.merge_gap,
                    mode: match args.delta_mode {
                        DeltaArg::Rolling => DeltaMode::Rolling,
                        DeltaArg::Block => DeltaMode::Block,
                    },
                },
                alpha: args.alpha,
                gap_policy: if args.forward_fill { GapPolicy::ForwardFill } else { GapPolicy::Error },
            };
            (settings, args.data_dir.clone(), args.output.out.clone(), args.output.format.clone())
        }
    };
    let analysis = run_analyze(&settings, &data_dir, args.remote.config().as_ref())?;
    for a in &analysis.report.assets {
        match a.status {
            AssetStatus::Analyzed => println!("{}: analyzed, {} warning event(s)", a.asset_id, a.warnings.len()),
            _ => println!("{}: {}", a.asset_id, a.reason.as_deref().unwrap_or("failed")),
        }
    }
    for path in emit_report(&analysis, &formats, &out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(analysis.report.exit_code())
}

fn simulate(args: SimulateArgs) -> Result<i32> {
    let params = args.model.params()?;
    let (summary, files) = run_simulate(&params, args.record_every, &args.output.format, &args.output.out)?;
    println!(
        "final u = {:.6}, tail mean = {:.6}, tail std = {:.6}",
        summary.final_value, summary.tail_mean, summary.tail_std
    );
    files.iter().for_each(|p| eprintln!("wrote {}", p.display()));
    Ok(0)
}

fn sweep(args: SweepArgs) -> Result<i32> {
    let parameter = match args.param {
        ParamArg::M => SweptParameter::M,
        ParamArg::R => SweptParameter::R,
        ParamArg::D => SweptParameter::D,
    };
    let m = &args.model;
    // With no --u0 every grid point starts on its own upper stable state.
    let base = ModelParams { m: m.m, r: m.r, d: m.d, dt: m.dt, t_max: m.tmax, u0: m.u0.unwrap_or(0.0), seed: m.seed };
    let spec = SweepSpec {
        parameter,
        grid: args.grid.0,
        base,
        ensemble: EnsembleConfig {
            n_realizations: args.realizations,
            burn_in: args.burn_in,
            sample_interval: args.sample_interval,
            window: args.window,
            detrend: !args.no_detrend,
            smoother: SmootherConfig::default(),
        },
        u0_policy: if args.model.u0.is_some() { U0Policy::Fixed } else { U0Policy::UpperStable },
    };
    let (result, files) = run_sweep(&spec, &args.output.format, &args.output.out)?;
    println!("{:>10} {:>10} {:>10}", parameter.name(), "mean_ar1", "mean_std");
    for ((v, a), s) in result.grid.iter().zip(&result.mean_ar1).zip(&result.mean_std) {
        println!("{v:>10.4} {a:>10.4} {s:>10.5}");
    }
    files.iter().for_each(|p| eprintln!("wrote {}", p.display()));
    Ok(0)
}

fn bifurcation(args: BifurcationArgs) -> Result<i32> {
    let axis = match args.axis {
        AxisArg::M => SweepAxis::M { r: args.fixed },
        AxisArg::R => SweepAxis::R { m: args.fixed },
    };
    let (out, files) = run_bifurcation(axis, &args.grid.0, &args.output.format, &args.output.out)?;
    for (m, u) in &out.fold_points {
        println!("fold at m = {m:.9}, u = {u:.9}");
    }
    files.iter().for_each(|p| eprintln!("wrote {}", p.display()));
    Ok(0)
}

fn fetch(args: FetchArgs) -> Result<i32> {
    let Some(cfg) = args.remote.config() else {
        bail!("no API base URL; pass --api-base or set {ENV_API_BASE}")
    };
    let series = fetch_remote(&args.asset, args.from, args.to, &cfg)?;
    let path = args.output.unwrap_or_else(|| args.data_dir.join(format!("{}.csv", args.asset)));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(&path, to_csv(&series)).with_context(|| format!("writing {}", path.display()))?;
    println!("{}: {} days written to {}", args.asset, series.len(), path.display());
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().context("starting worker threads")?;
    pool.install(|| match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Bifurcation(a) => bifurcation(a),
        Command::Fetch(a) => fetch(a),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
