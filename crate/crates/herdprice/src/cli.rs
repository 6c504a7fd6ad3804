//! Command-line front end.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use herdprice_core::bs::{surface_from_payoffs, PriceConvention};
use herdprice_core::calibration::{preset_library, CalibrationSpec, DeltaMode, Protocol};
use herdprice_core::dynamics::simulate_community;
use herdprice_core::mc::{PathEngine, SerialEngine, SimulationSpec};
use herdprice_core::params::ParamName;
use herdprice_core::population::mutual_information_neutral;
use herdprice_core::surface::{classify_slice, VolSurface};
use rayon::prelude::*;

use crate::config::{Command, ConfigError, RunConfig, DEFAULT_GRID_STEP};
use crate::engine::ParallelEngine;
use crate::format::fmt_sig;
use crate::output::{
    path_csv, plot_csv, population_csv, population_grid, population_row, write_json, CalibrationFile, PayoffFile,
};
use crate::surface_io::{read_surface, write_surface_with_config, SurfaceFormat};

/// Failure of a command, mapped to the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or input data.
    #[error("{0}")]
    Config(String),
    /// Anything that went wrong while running a valid configuration.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "herdprice", version, about = "Option pricing from the opinion dynamics of market players")]
pub struct Cli {
    /// JSON run configuration; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory (default: current directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Commands,
}

#[derive(Debug, Subcommand)]
pub enum Commands {
    /// Simulate price paths and write the Monte Carlo call-price grid.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Also write the community path of the first Monte Carlo path.
        #[arg(long)]
        dump_path: bool,
    },
    /// Invert simulated prices to an implied-volatility surface.
    Surface {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Invert this payoff grid instead of simulating.
        #[arg(long, value_name = "FILE")]
        payoffs: Option<PathBuf>,
        #[arg(long, value_parser = SurfaceFormat::from_str)]
        format: Option<SurfaceFormat>,
        /// Market offset subtracted from the inverted volatilities
        /// (default: the model's delta_market).
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        /// Discount prices by exp(-mu t) before inverting.
        #[arg(long)]
        discounted: bool,
    },
    /// Fit model parameters to a market surface.
    Calibrate {
        #[command(flatten)]
        model: ModelArgs,
        /// Market surface (.csv or .json).
        #[arg(long, value_name = "FILE")]
        target: Option<PathBuf>,
        /// full, spx-reduced or vod.
        #[arg(long, value_parser = parse_protocol)]
        protocol: Option<Protocol>,
        /// Comma-separated free parameters (overrides the protocol's set).
        #[arg(long, value_delimiter = ',', value_parser = parse_param)]
        free: Option<Vec<ParamName>>,
        /// Fit each maturity separately.
        #[arg(long)]
        per_maturity: bool,
        #[arg(long)]
        starts: Option<usize>,
        /// Monte Carlo paths per objective evaluation.
        #[arg(long)]
        paths: Option<usize>,
        /// computed or fitted.
        #[arg(long, value_parser = parse_delta_mode)]
        delta_mode: Option<DeltaMode>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Population mathematics at a point or over the unit square.
    Diagnose {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Grid spacing when no point is given.
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// List the built-in parameter presets.
    Presets {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Start from a named preset (see `herdprice presets`).
    #[arg(long)]
    pub preset: Option<String>,
    /// Override one parameter, e.g. `--set sigma_alpha=1.2` (repeatable).
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_assignment)]
    pub set: Vec<(ParamName, f64)>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub paths: Option<usize>,
    /// Time step in years.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Comma-separated maturities in years.
    #[arg(long, value_delimiter = ',')]
    pub maturities: Option<Vec<f64>>,
    /// Comma-separated strike/spot ratios.
    #[arg(long, value_delimiter = ',')]
    pub strikes: Option<Vec<f64>>,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    Protocol::from_str(s).map_err(|e| e.to_string())
}

fn parse_param(s: &str) -> Result<ParamName, String> {
    ParamName::from_str(s.trim()).map_err(|e| e.to_string())
}

fn parse_delta_mode(s: &str) -> Result<DeltaMode, String> {
    match s {
        "computed" => Ok(DeltaMode::Computed),
        "fitted" => Ok(DeltaMode::Fitted),
        other => Err(format!("unknown offset mode {other:?} (expected computed or fitted)")),
    }
}

fn parse_assignment(s: &str) -> Result<(ParamName, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let value: f64 = value.trim().parse().map_err(|_| format!("not a number: {value:?}"))?;
    Ok((parse_param(name)?, value))
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = &self.preset {
            cfg.model.preset = Some(p.clone());
        }
        for &(name, value) in &self.set {
            cfg.model.params.set(name, value);
        }
    }
}

impl GridArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let s = &mut cfg.simulation;
        s.n_paths = self.paths.or(s.n_paths);
        s.dt = self.dt.or(s.dt);
        if self.maturities.is_some() {
            s.maturities = self.maturities.clone();
        }
        if self.strikes.is_some() {
            s.strikes = self.strikes.clone();
        }
    }
}

/// Merges the config file with the command line.
pub fn build_config(cli: &Cli) -> Result<(RunConfig, Command), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.seed = cli.seed.or(cfg.seed);
    cfg.threads = cli.threads.or(cfg.threads);
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    let command = match &cli.command {
        Commands::Simulate { model, grid, dump_path } => {
            model.apply(&mut cfg);
            grid.apply(&mut cfg);
            if *dump_path {
                cfg.simulation.dump_path = Some(true);
            }
            Command::Simulate
        }
        Commands::Surface { model, grid, payoffs, format, delta, discounted } => {
            model.apply(&mut cfg);
            grid.apply(&mut cfg);
            let s = &mut cfg.surface;
            s.payoffs = payoffs.clone().or(s.payoffs.take());
            s.format = format.or(s.format);
            s.delta_market = delta.or(s.delta_market);
            if *discounted {
                s.convention = Some(PriceConvention::Discounted);
            }
            Command::Surface
        }
        Commands::Calibrate { model, target, protocol, free, per_maturity, starts, paths, delta_mode, max_iter } => {
            model.apply(&mut cfg);
            let c = &mut cfg.calibration;
            c.target = target.clone().or(c.target.take());
            c.protocol = protocol.or(c.protocol);
            if free.is_some() {
                c.free = free.clone();
            }
            if *per_maturity {
                c.per_maturity = Some(true);
            }
            c.n_starts = starts.or(c.n_starts);
            c.n_paths = paths.or(c.n_paths);
            c.delta_mode = delta_mode.or(c.delta_mode);
            if let Some(n) = max_iter {
                let mut s = c.simplex.unwrap_or_default();
                s.max_iter = *n;
                s.max_evals = s.max_evals.max(2 * n);
                c.simplex = Some(s);
            }
            Command::Calibrate
        }
        Commands::Diagnose { alpha, beta, grid_step } => {
            let d = &mut cfg.diagnose;
            d.alpha = alpha.or(d.alpha);
            d.beta = beta.or(d.beta);
            d.grid_step = grid_step.or(d.grid_step);
            Command::Diagnose
        }
        Commands::Presets { .. } => Command::Presets,
    };
    Ok((cfg, command))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let (cfg, command) = build_config(&cli)?;
    if cfg.threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let needs_out = !matches!(command, Command::Presets) && !(command == Command::Diagnose && is_point(&cfg));
    if needs_out {
        std::fs::create_dir_all(&out_dir).map_err(|e| runtime(format!("{}: {e}", out_dir.display())))?;
    }
    match (&cli.command, command) {
        (_, Command::Simulate) => simulate(&cfg, &out_dir),
        (_, Command::Surface) => surface(&cfg, &out_dir),
        (_, Command::Calibrate) => calibrate(&cfg, &out_dir),
        (_, Command::Diagnose) => diagnose(&cfg, &out_dir),
        (Commands::Presets { json }, _) => presets(*json),
        _ => unreachable!("command matches its arguments"),
    }
}

fn is_point(cfg: &RunConfig) -> bool {
    cfg.diagnose.alpha.is_some() || cfg.diagnose.beta.is_some()
}

fn engine(cfg: &RunConfig) -> Result<ParallelEngine, CliError> {
    ParallelEngine::new(cfg.threads).map_err(runtime)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let spec = cfg.simulation()?;
    let echo = cfg.resolved(Command::Simulate)?.to_value();
    let grid = engine(cfg)?.run_paths(&spec).map_err(runtime)?;
    let path = out.join("payoffs.json");
    write_json(&path, &PayoffFile::new(&grid, Some(echo.clone()))).map_err(runtime)?;
    println!(
        "wrote {} ({} maturities x {} strikes, {} paths, {} floor events)",
        path.display(),
        grid.maturities.len(),
        grid.strikes.len(),
        grid.n_paths,
        grid.floor_events
    );
    if cfg.simulation.dump_path.unwrap_or(false) {
        let horizon = spec.maturities.iter().copied().fold(0.0, f64::max);
        let m = spec.model;
        let community =
            simulate_community(m.alpha0, m.beta0, &spec.dynamics(), horizon, spec.base_seed).map_err(runtime)?;
        let path = out.join("community_path.csv");
        write(&path, &path_csv(&community, Some(&echo)))?;
        println!("wrote {} ({} steps)", path.display(), community.len() - 1);
    }
    Ok(())
}

fn surface(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let model = cfg.model()?;
    let echo = cfg.resolved(Command::Surface)?.to_value();
    let grid = match &cfg.surface.payoffs {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let file: PayoffFile =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let dt = cfg.simulation.dt.unwrap_or(herdprice_core::dynamics::TRADING_DAY);
            file.into_grid(dt).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => engine(cfg)?.run_paths(&cfg.simulation()?).map_err(runtime)?,
    };
    let delta = cfg.surface.delta_market.unwrap_or(model.delta_market);
    let model_surface = surface_from_payoffs(&grid, model.mu, delta, cfg.convention());
    let label = cfg.model.preset.clone().unwrap_or_else(|| "model".to_string());
    let market = VolSurface::from_model(label, "", &model_surface);
    let dropped = model_surface.points.len() - market.points.len();

    let format = cfg.surface_format();
    let path = out.join(format!("surface.{}", format.extension()));
    write_surface_with_config(&market, &path, format, Some(&echo))
        .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    println!("wrote {} ({} points)", path.display(), market.points.len());
    if model_surface.missing > 0 {
        println!("{} cells could not be inverted (outside the arbitrage band)", model_surface.missing);
    }
    if dropped > 0 {
        println!("{dropped} points have a non-positive volatility after the offset {delta} and were left out");
    }
    for (i, &t) in grid.maturities.iter().enumerate() {
        let slice = model_surface.slice(t);
        let rows: Vec<_> =
            slice.iter().map(|p| (p.strike_over_spot, p.sigma_imp, p.sigma_players, p.std_err)).collect();
        let path = out.join(format!("plot_m{}_t{}.csv", i + 1, fmt_sig(t)));
        write(&path, &plot_csv(&rows, Some(&echo)))?;
        let vols: Vec<f64> = slice.iter().map(|p| p.sigma_players).collect();
        println!("maturity {}: {} ({})", fmt_sig(t), classify_slice(&vols), path.display());
    }
    Ok(())
}

fn calibrate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let resolved = cfg.resolved(Command::Calibrate)?;
    let c = &resolved.calibration;
    let target_path = c.target.clone().ok_or_else(|| CliError::Config("calibrate needs a --target surface".into()))?;
    let target = read_surface(&target_path).map_err(|e| CliError::Config(e.to_string()))?;
    let protocol = c.protocol.unwrap_or(Protocol::Full);
    let mut start = cfg.model()?;
    protocol.fix(&mut start);
    let mc = SimulationSpec {
        n_paths: c.n_paths.unwrap_or_default(),
        dt: resolved.simulation.dt.unwrap_or_default(),
        drift: resolved.simulation.drift.unwrap_or_default(),
        gamma_star: resolved.simulation.gamma_star.unwrap_or(0.5),
        ..SimulationSpec::new(start, cfg.seed())
    };
    let spec = CalibrationSpec {
        target,
        start,
        free: c.free.clone().unwrap_or_default(),
        delta_mode: c.delta_mode.unwrap_or_default(),
        n_starts: c.n_starts.unwrap_or_default(),
        per_maturity: c.per_maturity.unwrap_or_default(),
        mc,
        simplex: c.simplex.unwrap_or_default(),
        steps: c.steps.unwrap_or_default(),
        jitter: c.jitter.unwrap_or_default(),
    };
    let seed = cfg.seed();
    let tasks = spec.tasks(seed).map_err(|e| CliError::Config(e.to_string()))?;
    let pool = engine(cfg)?;
    eprintln!("running {} descents on {} threads", tasks.len(), pool.threads());
    let records = pool
        .install(|| {
            tasks
                .par_iter()
                .map(|t| spec.run_task(t, &SerialEngine).map(|r| (t.block, r)))
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(runtime)?;
    let report = spec.assemble(seed, records).map_err(runtime)?;
    let echo = resolved.to_value();
    let path = out.join("calibration.json");
    write_json(&path, &CalibrationFile { config: echo, report: &report }).map_err(runtime)?;
    let table = report.table();
    write(&out.join("calibration.txt"), &table)?;
    print!("{table}");
    println!("wrote {}", path.display());
    Ok(())
}

fn diagnose(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    if is_point(cfg) {
        let (Some(a), Some(b)) = (cfg.diagnose.alpha, cfg.diagnose.beta) else {
            return Err(CliError::Config("a point needs both --alpha and --beta".into()));
        };
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
            return Err(CliError::Config(format!("alpha and beta must lie in [0, 1], got ({a}, {b})")));
        }
        let r = population_row(a, b);
        let show = |v: Option<f64>, why: &str| v.map(fmt_sig).unwrap_or_else(|| why.to_string());
        println!("alpha                {}", fmt_sig(a));
        println!("beta                 {}", fmt_sig(b));
        println!("bull ratio gamma     {}", show(r.gamma, "singular (indeterminate at alpha = 0, beta = 1)"));
        println!("herding I            {}", fmt_sig(r.herding));
        println!("responsivity chi     {}", show(r.responsivity, "divergent"));
        println!("mutual information   {}", show(r.mutual_information, "undefined"));
        println!("  at gamma = 1/2     {}", fmt_sig(mutual_information_neutral(r.herding)));
        return Ok(());
    }
    let step = cfg.diagnose.grid_step.unwrap_or(DEFAULT_GRID_STEP);
    let rows = population_grid(step).map_err(CliError::Config)?;
    let echo = cfg.resolved(Command::Diagnose)?.to_value();
    let path = out.join("population_grid.csv");
    write(&path, &population_csv(&rows, Some(&echo)))?;
    let singular = rows.iter().filter(|r| r.singular).count();
    println!("wrote {} ({} rows, {} singular)", path.display(), rows.len(), singular);
    Ok(())
}

fn presets(json: bool) -> Result<(), CliError> {
    let lib = preset_library();
    if json {
        println!("{}", serde_json::to_string_pretty(&lib).map_err(runtime)?);
        return Ok(());
    }
    println!(
        "{:<20} {:>6} {:>6} {:>6} {:>5} {:>6} {:>5} {:>5} {:>5} {:>7}  maturities",
        "name", "sigma", "k", "i_low", "i_up", "mu", "a0", "b0", "B", "delta"
    );
    for p in lib {
        let m = p.params;
        let mats: Vec<String> = p.maturities.iter().map(|t| format!("{t:.4}")).collect();
        println!(
            "{:<20} {:>6.2} {:>6.2} {:>6.2} {:>5.2} {:>6.3} {:>5.2} {:>5.2} {:>5.3} {:>7.4}  {}",
            p.name,
            m.sigma_alpha,
            m.k_asym,
            m.i_low,
            m.i_up,
            m.mu,
            m.alpha0,
            m.beta0,
            m.b_par,
            m.delta_market,
            mats.join(",")
        );
    }
    Ok(())
}
