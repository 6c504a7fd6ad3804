//! Fitting model parameters to market implied-volatility surfaces.
//!
//! The loss of a parameter vector is the RMSE between model and market
//! volatilities over the target cells, plus half a vol point per unit fraction
//! of cells the model could not price. Infeasible vectors score at least
//! [`PENALTY_BASE`], far above any feasible loss, so an unconstrained
//! Nelder–Mead simplex stays inside the parameter domain.
//!
//! Each descent fixes its Monte Carlo seed (common random numbers), which
//! makes the loss a deterministic function along the descent. Descents differ
//! in seed and in their jittered starting point, so the spread of the fitted
//! values reflects both optimisation and sampling noise.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bs::{surface_from_payoffs, PriceConvention};
use crate::error::{Error, Result};
use crate::mc::{PathEngine, SerialEngine, SimulationSpec};
use crate::params::{ModelParams, ParamName};
use crate::rng::{derive_seed, stream_rng, uniform};
use crate::simplex::{minimize, SimplexOptions};
use crate::surface::VolSurface;

/// Loss floor of an infeasible parameter vector.
pub const PENALTY_BASE: f64 = 1e3;
/// Ceiling of a feasible loss.
pub const LOSS_CAP: f64 = 10.0;
/// Loss added per unit fraction of unpriceable target cells.
pub const MISSING_WEIGHT: f64 = 0.5;

/// How the market offset is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DeltaMode {
    /// Least-squares constant offset, recomputed at every evaluation.
    #[default]
    Computed,
    /// `delta_market` taken from the parameters, a simplex coordinate when free.
    Fitted,
}

/// Detailed result of one loss evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectiveValue {
    pub loss: f64,
    /// Volatility RMSE over the priced cells (`LOSS_CAP` when none were priced).
    pub rmse: f64,
    pub delta_market: f64,
    /// Target cells the model could not price.
    pub missing: usize,
    /// Sum of parameter invariant violations; zero when feasible.
    pub violation: f64,
}

/// A target surface laid onto the Monte Carlo grid.
#[derive(Debug, Clone)]
pub struct Objective {
    maturities: Vec<f64>,
    strikes: Vec<f64>,
    /// (maturity index, strike index, market vol)
    cells: Vec<(usize, usize, f64)>,
    template: SimulationSpec,
    mode: DeltaMode,
}

impl Objective {
    /// `template` supplies paths, time step and seed; its grid is replaced by
    /// the target's.
    pub fn new(target: &VolSurface, template: &SimulationSpec, mode: DeltaMode) -> Result<Self> {
        target.validate()?;
        if target.is_empty() {
            return Err(Error::Config(format!("target surface {:?} has no points", target.label)));
        }
        let maturities = target.maturities();
        let strikes = target.strikes();
        let find = |grid: &[f64], x: f64| grid.iter().position(|&g| crate::bs::close(g, x));
        let cells = target
            .points
            .iter()
            .map(|p| {
                // both lookups succeed: the grids are built from these points
                (
                    find(&maturities, p.maturity_years).unwrap(),
                    find(&strikes, p.strike_over_spot).unwrap(),
                    p.implied_vol,
                )
            })
            .collect();
        Ok(Self { maturities, strikes, cells, template: template.clone(), mode })
    }

    pub fn mode(&self) -> DeltaMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.template.base_seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut o = self.clone();
        o.template.base_seed = seed;
        o
    }

    /// Simulation spec for `params` on the target grid.
    pub fn simulation(&self, params: &ModelParams) -> SimulationSpec {
        SimulationSpec {
            model: *params,
            maturities: self.maturities.clone(),
            strikes: self.strikes.clone(),
            diagnostics: false,
            ..self.template.clone()
        }
    }

    pub fn evaluate<E: PathEngine + ?Sized>(&self, engine: &E, params: &ModelParams) -> ObjectiveValue {
        let violation = params.violation();
        let infeasible = |violation: f64| ObjectiveValue {
            loss: PENALTY_BASE * (1.0 + violation),
            rmse: LOSS_CAP,
            delta_market: params.delta_market,
            missing: self.cells.len(),
            violation,
        };
        if violation > 0.0 {
            return infeasible(violation);
        }
        let grid = match engine.run_paths(&self.simulation(params)) {
            Ok(g) => g,
            Err(_) => return infeasible(0.0),
        };
        let surface = surface_from_payoffs(&grid, params.mu, 0.0, PriceConvention::Undiscounted);
        let mut pairs = Vec::with_capacity(self.cells.len());
        for &(m, k, market) in &self.cells {
            if let Some(p) = surface.get(self.maturities[m], self.strikes[k]) {
                pairs.push((p.sigma_players, market));
            }
        }
        let missing = self.cells.len() - pairs.len();
        let delta = match self.mode {
            DeltaMode::Fitted => params.delta_market,
            DeltaMode::Computed if pairs.is_empty() => params.delta_market,
            DeltaMode::Computed => pairs.iter().map(|(m, t)| m - t).sum::<f64>() / pairs.len() as f64,
        };
        let rmse = if pairs.is_empty() {
            LOSS_CAP
        } else {
            let sq: f64 = pairs.iter().map(|(m, t)| (m - delta - t) * (m - delta - t)).sum();
            libm::sqrt(sq / pairs.len() as f64)
        };
        let mut loss = rmse + MISSING_WEIGHT * missing as f64 / self.cells.len() as f64;
        if !(loss < LOSS_CAP) {
            loss = LOSS_CAP;
        }
        ObjectiveValue { loss, rmse, delta_market: delta, missing, violation }
    }
}

/// Loss of `params` against `target` with the offset computed, on one thread.
pub fn objective(params: &ModelParams, target: &VolSurface, mc_spec: &SimulationSpec) -> f64 {
    match Objective::new(target, mc_spec, DeltaMode::Computed) {
        Ok(o) => o.evaluate(&SerialEngine, params).loss,
        Err(_) => LOSS_CAP,
    }
}

/// Initial simplex step sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct StepSizes {
    /// Fraction of the starting value for unbounded parameters.
    pub relative: f64,
    /// Absolute step for probabilities and herding limits, and for unbounded
    /// parameters starting at zero.
    pub absolute: f64,
}

impl Default for StepSizes {
    fn default() -> Self {
        Self { relative: 0.1, absolute: 0.05 }
    }
}

/// Perturbation of starting points between descents.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Jitter {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for Jitter {
    fn default() -> Self {
        Self { relative: 0.2, absolute: 0.1 }
    }
}

pub const DEFAULT_STARTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationSpec {
    pub target: VolSurface,
    /// Values of the fixed parameters and the unjittered start of the free ones.
    pub start: ModelParams,
    pub free: Vec<ParamName>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub delta_mode: DeltaMode,
    pub n_starts: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub per_maturity: bool,
    /// Monte Carlo controls; its model and grid are ignored.
    pub mc: SimulationSpec,
    #[cfg_attr(feature = "serde", serde(default))]
    pub simplex: SimplexOptions,
    #[cfg_attr(feature = "serde", serde(default))]
    pub steps: StepSizes,
    #[cfg_attr(feature = "serde", serde(default))]
    pub jitter: Jitter,
}

/// One Nelder–Mead descent to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentTask {
    pub block: usize,
    pub run: usize,
    pub mc_seed: u64,
    pub start: ModelParams,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunRecord {
    pub run: usize,
    pub mc_seed: u64,
    pub start: ModelParams,
    /// Best vertex, with the offset actually used filled in.
    pub end: ModelParams,
    pub loss: f64,
    pub rmse: f64,
    pub missing: usize,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub moved: bool,
    /// Best loss per simplex iteration.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamStat {
    pub name: ParamName,
    pub mean: f64,
    /// Sample standard deviation over runs (zero for a single run).
    pub std: f64,
}

/// Outcome of the descents on one target (the whole surface or one maturity).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationResult {
    /// Set in per-maturity mode.
    pub maturity: Option<f64>,
    pub free: Vec<ParamName>,
    pub delta_mode: DeltaMode,
    pub stats: Vec<ParamStat>,
    pub best: ModelParams,
    pub best_loss: f64,
    pub best_rmse: f64,
    pub best_run: usize,
    pub runs: Vec<RunRecord>,
}

impl CalibrationResult {
    pub fn stat(&self, name: ParamName) -> Option<&ParamStat> {
        self.stats.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationReport {
    pub seed: u64,
    pub blocks: Vec<CalibrationResult>,
}

impl CalibrationReport {
    /// Parameter table with one `mean ± std` column per block.
    pub fn table(&self) -> String {
        let mut names: Vec<ParamName> = Vec::new();
        for b in &self.blocks {
            for s in &b.stats {
                if !names.contains(&s.name) {
                    names.push(s.name);
                }
            }
        }
        let headers: Vec<String> = self
            .blocks
            .iter()
            .map(|b| match b.maturity {
                Some(t) => format!("t = {t:.4}"),
                None => String::from("surface"),
            })
            .collect();
        let mut out = format!("{:<14}", "parameter");
        for h in &headers {
            out.push_str(&format!(" | {h:<22}"));
        }
        out.push('\n');
        out.push_str(&"-".repeat(14 + 25 * headers.len()));
        out.push('\n');
        for n in &names {
            out.push_str(&format!("{:<14}", n.as_str()));
            for b in &self.blocks {
                let cell = match b.stat(*n) {
                    Some(s) => format!("{:.4} ± {:.4}", s.mean, s.std),
                    None => String::from("-"),
                };
                out.push_str(&format!(" | {cell:<22}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<14}", "best loss"));
        for b in &self.blocks {
            out.push_str(&format!(" | {:<22}", format!("{:.6}", b.best_loss)));
        }
        out.push('\n');
        out
    }
}

impl CalibrationSpec {
    /// Whole-surface calibration of `free` starting from `start`, with
    /// default controls.
    pub fn new(target: VolSurface, start: ModelParams, free: Vec<ParamName>, mc: SimulationSpec) -> Self {
        Self {
            target,
            start,
            free,
            delta_mode: DeltaMode::Computed,
            n_starts: DEFAULT_STARTS,
            per_maturity: false,
            mc,
            simplex: SimplexOptions::default(),
            steps: StepSizes::default(),
            jitter: Jitter::default(),
        }
    }

    /// Parameters moved by the simplex.
    pub fn coordinates(&self) -> Vec<ParamName> {
        self.free
            .iter()
            .copied()
            .filter(|p| !(*p == ParamName::DeltaMarket && self.delta_mode == DeltaMode::Computed))
            .collect()
    }

    /// Offset mode used by the loss: a market offset that is not free stays
    /// at its starting value.
    pub fn effective_mode(&self) -> DeltaMode {
        if self.free.contains(&ParamName::DeltaMarket) {
            self.delta_mode
        } else {
            DeltaMode::Fitted
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::Config("at least one parameter must be free".into()));
        }
        for (i, p) in self.free.iter().enumerate() {
            if self.free[..i].contains(p) {
                return Err(Error::Config(format!("parameter {p} listed as free twice")));
            }
        }
        if self.coordinates().is_empty() {
            return Err(Error::Config("the computed market offset cannot be the only free parameter".into()));
        }
        if self.n_starts == 0 {
            return Err(Error::Config("n_starts must be positive".into()));
        }
        if self.mc.n_paths == 0 {
            return Err(Error::Config("number of paths must be positive".into()));
        }
        self.target.validate()?;
        if self.target.is_empty() {
            return Err(Error::Config("target surface has no points".into()));
        }
        self.start.validate()
    }

    /// Targets of the calibration blocks.
    pub fn blocks(&self) -> Vec<(Option<f64>, VolSurface)> {
        if self.per_maturity {
            self.target.maturities().into_iter().map(|t| (Some(t), self.target.restrict(t))).collect()
        } else {
            vec![(None, self.target.clone())]
        }
    }

    /// All descents, in block then run order. Seeds derive from `seed` only.
    pub fn tasks(&self, seed: u64) -> Result<Vec<DescentTask>> {
        self.validate()?;
        let mut out = Vec::new();
        for block in 0..self.blocks().len() {
            let block_seed = derive_seed(seed, block as u64);
            for run in 0..self.n_starts {
                let mc_seed = derive_seed(block_seed, run as u64);
                let start = self.jittered_start(block_seed, run);
                out.push(DescentTask { block, run, mc_seed, start });
            }
        }
        Ok(out)
    }

    fn jittered_start(&self, block_seed: u64, run: usize) -> ModelParams {
        // stream 0 of each seed belongs to Monte Carlo path 0; jitter draws
        // live far away from any path stream
        let mut rng = stream_rng(block_seed, u64::MAX - run as u64);
        for _ in 0..32 {
            let mut p = self.start;
            for name in self.coordinates() {
                let x = p.get(name);
                let u = 2.0 * uniform(&mut rng) - 1.0;
                let y = if name.is_bounded() {
                    let (lo, hi) = bounds(name);
                    (x + self.jitter.absolute * u).clamp(lo, hi)
                } else {
                    x * (1.0 + self.jitter.relative * u)
                };
                p.set(name, y);
            }
            if p.violation() == 0.0 {
                return p;
            }
        }
        self.start
    }

    fn initial_steps(&self, start: &ModelParams) -> Vec<f64> {
        self.coordinates()
            .into_iter()
            .map(|name| {
                let x = start.get(name);
                let step = if name.is_bounded() || x == 0.0 {
                    self.steps.absolute
                } else {
                    self.steps.relative * libm::fabs(x)
                };
                // step inward when the outward vertex would be infeasible
                let mut probe = *start;
                probe.set(name, x + step);
                if probe.violation() > 0.0 {
                    -step
                } else {
                    step
                }
            })
            .collect()
    }

    /// Runs one descent.
    pub fn run_task<E: PathEngine + ?Sized>(&self, task: &DescentTask, engine: &E) -> Result<RunRecord> {
        let blocks = self.blocks();
        let (_, target) =
            blocks.get(task.block).ok_or_else(|| Error::Config(format!("no calibration block {}", task.block)))?;
        let mc = SimulationSpec { base_seed: task.mc_seed, ..self.mc.clone() };
        let objective = Objective::new(target, &mc, self.effective_mode())?;
        let coords = self.coordinates();
        let to_params = |x: &[f64]| {
            let mut p = task.start;
            for (name, v) in coords.iter().zip(x) {
                p.set(*name, *v);
            }
            p
        };
        let x0: Vec<f64> = coords.iter().map(|n| task.start.get(*n)).collect();
        let steps = self.initial_steps(&task.start);
        let out = minimize(|x| objective.evaluate(engine, &to_params(x)).loss, &x0, &steps, &self.simplex);
        let mut end = to_params(&out.x);
        let value = objective.evaluate(engine, &end);
        end.delta_market = value.delta_market;
        Ok(RunRecord {
            run: task.run,
            mc_seed: task.mc_seed,
            start: task.start,
            end,
            loss: out.f,
            rmse: value.rmse,
            missing: value.missing,
            iterations: out.iterations,
            evaluations: out.evaluations + 1,
            converged: out.converged,
            moved: out.moved,
            trace: out.trace,
        })
    }

    /// Aggregates finished runs (in any order) into per-block results.
    pub fn assemble(&self, seed: u64, mut records: Vec<(usize, RunRecord)>) -> Result<CalibrationReport> {
        records.sort_by_key(|(block, r)| (*block, r.run));
        let mut blocks = Vec::new();
        for (b, (maturity, _)) in self.blocks().into_iter().enumerate() {
            let runs: Vec<RunRecord> = records.iter().filter(|(blk, _)| *blk == b).map(|(_, r)| r.clone()).collect();
            if runs.is_empty() {
                return Err(Error::Config(format!("calibration block {b} has no runs")));
            }
            if runs.iter().all(|r| !r.moved) {
                return Err(Error::NoImprovement);
            }
            let best_idx = runs
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.loss.total_cmp(&b.1.loss).then(a.0.cmp(&b.0)))
                .map(|(i, _)| i)
                .unwrap_or(0);
            let stats = self
                .free
                .iter()
                .map(|&name| {
                    let xs: Vec<f64> = runs.iter().map(|r| r.end.get(name)).collect();
                    let (mean, std) = mean_std(&xs);
                    ParamStat { name, mean, std }
                })
                .collect();
            let best = &runs[best_idx];
            blocks.push(CalibrationResult {
                maturity,
                free: self.free.clone(),
                delta_mode: self.effective_mode(),
                stats,
                best: best.end,
                best_loss: best.loss,
                best_rmse: best.rmse,
                best_run: best.run,
                runs,
            });
        }
        Ok(CalibrationReport { seed, blocks })
    }
}

fn bounds(name: ParamName) -> (f64, f64) {
    match name {
        ParamName::Alpha0 | ParamName::Beta0 => (0.0, 1.0),
        _ => (-1.0, 1.0),
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

/// Runs every descent on the calling thread.
pub fn calibrate<E: PathEngine + ?Sized>(
    spec: &CalibrationSpec,
    rng_seed: u64,
    engine: &E,
) -> Result<CalibrationReport> {
    let tasks = spec.tasks(rng_seed)?;
    let mut records = Vec::with_capacity(tasks.len());
    for t in &tasks {
        records.push((t.block, spec.run_task(t, engine)?));
    }
    spec.assemble(rng_seed, records)
}

/// Calibration protocols of the reference fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Protocol {
    /// All nine parameters free over the whole surface.
    Full,
    /// Herding limits, volatilities and offset free; prime 0.045, `B = 1`
    /// and a neutral start fixed.
    SpxReduced,
    /// One fit per maturity without herding limits; prime 0.045.
    Vod,
}

impl Protocol {
    pub fn free(self) -> Vec<ParamName> {
        use ParamName::*;
        match self {
            Protocol::Full => ParamName::ALL.to_vec(),
            Protocol::SpxReduced => vec![IUp, ILow, SigmaAlpha, KAsym, DeltaMarket],
            Protocol::Vod => vec![SigmaAlpha, KAsym, Alpha0, Beta0, BPar, DeltaMarket],
        }
    }

    pub fn per_maturity(self) -> bool {
        self == Protocol::Vod
    }

    /// Sets the values the protocol holds fixed.
    pub fn fix(self, p: &mut ModelParams) {
        match self {
            Protocol::Full => {}
            Protocol::SpxReduced => {
                p.mu = 0.045;
                p.b_par = 1.0;
                p.alpha0 = 0.5;
                p.beta0 = 0.5;
            }
            Protocol::Vod => {
                p.mu = 0.045;
                p.i_low = -1.0;
                p.i_up = 1.0;
            }
        }
    }

    /// Applies the protocol to a spec: free set, fixed values, per-maturity flag.
    pub fn apply(self, spec: &mut CalibrationSpec) {
        spec.free = self.free();
        spec.per_maturity = self.per_maturity();
        self.fix(&mut spec.start);
    }
}

impl core::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Protocol::Full),
            "spx-reduced" => Ok(Protocol::SpxReduced),
            "vod" => Ok(Protocol::Vod),
            other => Err(Error::Config(format!("unknown protocol {other:?} (expected full, spx-reduced or vod)"))),
        }
    }
}

/// A published parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Maturities (years) the set was fitted to.
    pub maturities: &'static [f64],
    pub params: ModelParams,
}

const ALL_MATURITIES: &[f64] = &[1.0 / 12.0, 0.25, 0.5, 1.0];

#[allow(clippy::too_many_arguments)]
const fn p(
    i_up: f64,
    i_low: f64,
    sigma_alpha: f64,
    k_asym: f64,
    mu: f64,
    alpha0: f64,
    beta0: f64,
    b_par: f64,
    delta_market: f64,
) -> ModelParams {
    ModelParams { sigma_alpha, k_asym, i_low, i_up, mu, alpha0, beta0, b_par, delta_market }
}

/// The fitted parameter sets of the SPX and VOD studies, plus a narrow-strip
/// Black-Scholes limit.
pub fn preset_library() -> Vec<Preset> {
    vec![
        Preset {
            name: "spx-2001-full",
            description: "SPX 12/26/01, all nine parameters fitted",
            maturities: ALL_MATURITIES,
            params: p(0.24, -0.03, 1.37, 0.74, 0.069, 0.50, 0.51, 1.09, 0.99),
        },
        Preset {
            name: "spx-2001-reduced",
            description: "SPX 12/26/01, reduced fit with prime 0.045, B = 1 and a neutral start",
            maturities: ALL_MATURITIES,
            params: p(0.23, -0.05, 1.38, 0.74, 0.045, 0.5, 0.5, 1.0, 0.88),
        },
        Preset {
            name: "vod-2001-1m",
            description: "VOD 12/27/01, 1 month, no herding limits",
            maturities: &[1.0 / 12.0],
            params: p(1.0, -1.0, 1.74, 0.64, 0.045, 0.79, 0.35, 1.00, 0.17),
        },
        Preset {
            name: "vod-2001-3m",
            description: "VOD 12/27/01, 3 months, no herding limits",
            maturities: &[0.25],
            params: p(1.0, -1.0, 1.90, 0.83, 0.045, 0.74, 0.38, 1.06, 0.44),
        },
        Preset {
            name: "vod-2001-6m",
            description: "VOD 12/27/01, 6 months, no herding limits",
            maturities: &[0.5],
            params: p(1.0, -1.0, 1.31, 0.85, 0.045, 0.74, 0.43, 1.05, 0.21),
        },
        Preset {
            name: "vod-2001-1y",
            description: "VOD 12/27/01, 1 year, no herding limits",
            maturities: &[1.0],
            params: p(1.0, -1.0, 1.01, 0.91, 0.045, 0.72, 0.62, 1.13, 0.29),
        },
        Preset {
            name: "vod-2001-6m-limits",
            description: "VOD 12/27/01, 6 months, herding limits with a neutral start (B = 1 assumed)",
            maturities: &[0.5],
            params: p(0.29, -0.11, 1.28, 0.91, 0.045, 0.5, 0.5, 1.0, 7.6e-3),
        },
        Preset {
            name: "vod-2001-1y-limits",
            description: "VOD 12/27/01, 1 year, herding limits with a neutral start (B = 1 assumed)",
            maturities: &[1.0],
            params: p(0.21, -0.11, 1.33, 1.07, 0.045, 0.5, 0.5, 1.0, 2.3e-3),
        },
        Preset {
            name: "spx-2005-1d",
            description: "SPX 09/15/05, 1 trading day, no herding limits",
            maturities: &[1.0 / 250.0],
            params: p(1.0, -1.0, 24.0, 0.97, 0.065, 0.87, 0.19, 0.005, -0.007),
        },
        Preset {
            name: "spx-2005-1m",
            description: "SPX 09/15/05, 1 month, no herding limits",
            maturities: &[1.0 / 12.0],
            params: p(1.0, -1.0, 5.6, 0.62, 0.065, 0.94, 0.16, 0.79, 0.40),
        },
        Preset {
            name: "spx-2005-3m",
            description: "SPX 09/15/05, 3 months",
            maturities: &[0.25],
            params: p(0.47, -0.20, 1.54, 0.61, 0.065, 0.48, 0.43, 1.19, 1.30),
        },
        Preset {
            name: "spx-2005-6m",
            description: "SPX 09/15/05, 6 months",
            maturities: &[0.5],
            params: p(0.39, -0.15, 1.46, 0.80, 0.065, 0.47, 0.46, 1.11, 1.33),
        },
        Preset {
            name: "spx-2005-15m",
            description: "SPX 09/15/05, 15 months",
            maturities: &[1.25],
            params: p(0.28, -0.11, 1.45, 0.87, 0.065, 0.48, 0.51, 1.09, 1.33),
        },
        Preset {
            name: "bs-strip",
            description: "Black-Scholes limit: herding confined to +-0.01 around a neutral start",
            maturities: ALL_MATURITIES,
            params: p(0.01, -0.01, 0.5, 1.0, 0.0, 0.5, 0.5, 1.0, 0.0),
        },
    ]
}

pub fn preset(name: &str) -> Result<Preset> {
    preset_library().into_iter().find(|p| p.name == name).ok_or_else(|| Error::UnknownPreset(String::from(name)))
}
