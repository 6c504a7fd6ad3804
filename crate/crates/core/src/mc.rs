//! Monte Carlo engine: community + price paths, call payoffs over a
//! maturity x strike grid, and their means with standard errors.
//!
//! Paths are processed in fixed-size chunks. Each path draws from its own
//! stream keyed by `(base_seed, path_index)` and chunk tallies are merged in
//! chunk order, so results are bitwise identical however the chunks are
//! scheduled. [`SerialEngine`] runs them in order on the calling thread; the
//! `herdprice` crate provides a multi-threaded engine over the same chunks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::bs::call_payoff;
use crate::dynamics::{initial_state, step_with, steps_for, DriftTarget, DynamicsConfig, TRADING_DAY};
use crate::error::{Error, Result};
use crate::math::{moments, Moments};
use crate::params::ModelParams;
use crate::population::{BullRatio, PopulationState};
use crate::pricemap::{update_from_log_odds, PriceState};
use crate::rng::{standard_normal, stream_rng};

/// Paths per work unit.
pub const CHUNK_PATHS: u64 = 512;

pub const DEFAULT_PATHS: usize = 200_000;
pub const DEFAULT_MATURITIES: [f64; 4] = [1.0 / 12.0, 0.25, 0.5, 1.0];
pub const DEFAULT_STRIKES: [f64; 9] = [0.8, 0.85, 0.9, 0.95, 1.0, 1.05, 1.1, 1.15, 1.2];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationSpec {
    pub model: ModelParams,
    /// Years, strictly increasing.
    pub maturities: Vec<f64>,
    /// Strike / spot ratios.
    pub strikes: Vec<f64>,
    pub n_paths: usize,
    pub dt: f64,
    pub base_seed: u64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub drift: DriftTarget,
    #[cfg_attr(feature = "serde", serde(default = "half"))]
    pub gamma_star: f64,
    /// Also collect terminal prices and per-step log returns.
    #[cfg_attr(feature = "serde", serde(default))]
    pub diagnostics: bool,
}

#[cfg(feature = "serde")]
fn half() -> f64 {
    0.5
}

impl SimulationSpec {
    /// Default grid (1, 3, 6, 12 months x strikes 0.80..1.20), daily steps.
    pub fn new(model: ModelParams, base_seed: u64) -> Self {
        Self {
            model,
            maturities: DEFAULT_MATURITIES.to_vec(),
            strikes: DEFAULT_STRIKES.to_vec(),
            n_paths: DEFAULT_PATHS,
            dt: TRADING_DAY,
            base_seed,
            drift: DriftTarget::SameHerding,
            gamma_star: 0.5,
            diagnostics: false,
        }
    }

    pub fn dynamics(&self) -> DynamicsConfig {
        self.model.dynamics(self.dt, self.drift, self.gamma_star)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::Config("number of paths must be positive".into()));
        }
        if self.maturities.is_empty() || self.strikes.is_empty() {
            return Err(Error::Config("maturity and strike grids must be non-empty".into()));
        }
        if self.maturities.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::Config(format!("maturities must be positive: {:?}", self.maturities)));
        }
        if self.maturities.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("maturities must be strictly increasing: {:?}", self.maturities)));
        }
        if self.strikes.iter().any(|k| !(*k >= 0.0) || !k.is_finite()) {
            return Err(Error::Config(format!("strikes must be non-negative: {:?}", self.strikes)));
        }
        if !(self.model.b_par > 0.0) || !self.model.b_par.is_finite() {
            return Err(Error::Config(format!("vote-to-price coefficient must be positive, got {}", self.model.b_par)));
        }
        self.dynamics().validate()
    }

    pub fn n_chunks(&self) -> u64 {
        (self.n_paths as u64).div_ceil(CHUNK_PATHS)
    }

    /// Path indices of chunk `c`.
    pub fn chunk_range(&self, c: u64) -> Range<u64> {
        let start = c * CHUNK_PATHS;
        start..(start + CHUNK_PATHS).min(self.n_paths as u64)
    }
}

/// Precomputed per-run constants.
#[derive(Debug, Clone)]
pub struct PathPlan {
    cfg: DynamicsConfig,
    init: PopulationState,
    init_log_odds: f64,
    b_par: f64,
    sqrt_dt: f64,
    maturity_steps: Vec<usize>,
    strikes: Vec<f64>,
    seed: u64,
    diagnostics: bool,
}

impl PathPlan {
    pub fn new(spec: &SimulationSpec) -> Result<Self> {
        spec.validate()?;
        let cfg = spec.dynamics();
        let init = initial_state(spec.model.alpha0, spec.model.beta0, &cfg)?;
        let init_log_odds = BullRatio::clamped(init.steady_state()?)?.log_odds();
        let maturity_steps = spec.maturities.iter().map(|&t| steps_for(t, spec.dt).max(1)).collect();
        Ok(Self {
            cfg,
            init,
            init_log_odds,
            b_par: spec.model.b_par,
            sqrt_dt: libm::sqrt(spec.dt),
            maturity_steps,
            strikes: spec.strikes.clone(),
            seed: spec.base_seed,
            diagnostics: spec.diagnostics,
        })
    }

    /// Simulated horizon (whole steps) for each maturity.
    pub fn horizons(&self) -> Vec<f64> {
        self.maturity_steps.iter().map(|&n| n as f64 * self.cfg.dt).collect()
    }

    fn cells(&self) -> usize {
        self.maturity_steps.len() * self.strikes.len()
    }

    pub fn empty_tally(&self) -> Tally {
        Tally {
            paths: 0,
            sum: vec![0.0; self.cells()],
            sum_sq: vec![0.0; self.cells()],
            floor_events: 0,
            steps: 0,
            step_log_sum: 0.0,
            step_log_sq: 0.0,
            terminal: if self.diagnostics { vec![Vec::new(); self.maturity_steps.len()] } else { Vec::new() },
        }
    }

    /// Simulates the paths in `range` and tallies their payoffs.
    pub fn simulate(&self, range: Range<u64>) -> Tally {
        let mut tally = self.empty_tally();
        let n_k = self.strikes.len();
        let last = *self.maturity_steps.last().unwrap_or(&0);
        for path in range {
            let mut rng = stream_rng(self.seed, path);
            let mut state = self.init;
            let mut log_odds = self.init_log_odds;
            let mut price = PriceState { s: 1.0, b_par: self.b_par };
            let mut next_m = 0;
            for step in 1..=last {
                let z1 = standard_normal(&mut rng);
                let z2 = standard_normal(&mut rng);
                state = step_with(state, &self.cfg, self.sqrt_dt, [z1, z2]);
                // the repaired state keeps 1 + alpha - beta >= 2e-6
                let g = ((1.0 - state.beta) / (1.0 + state.alpha - state.beta))
                    .clamp(crate::population::GAMMA_EPS, 1.0 - crate::population::GAMMA_EPS);
                let next_log_odds = libm::log(g / (1.0 - g));
                let prev = price.s;
                let moved = update_from_log_odds(price, next_log_odds - log_odds);
                price = moved.price;
                log_odds = next_log_odds;
                if moved.floored {
                    tally.floor_events += 1;
                }
                if self.diagnostics {
                    let r = libm::log(price.s / prev);
                    tally.step_log_sum += r;
                    tally.step_log_sq += r * r;
                }
                while next_m < self.maturity_steps.len() && self.maturity_steps[next_m] == step {
                    let base = next_m * n_k;
                    for (k, &strike) in self.strikes.iter().enumerate() {
                        let pay = call_payoff(price.s, strike);
                        tally.sum[base + k] += pay;
                        tally.sum_sq[base + k] += pay * pay;
                    }
                    if self.diagnostics {
                        tally.terminal[next_m].push(price.s);
                    }
                    next_m += 1;
                }
            }
            tally.steps += last as u64;
            tally.paths += 1;
        }
        tally
    }

    pub fn finish(&self, spec: &SimulationSpec, tally: Tally) -> SimulationRun {
        let n = tally.paths as f64;
        let n_k = self.strikes.len();
        let mut mean_price = Vec::with_capacity(self.maturity_steps.len());
        let mut std_err = Vec::with_capacity(self.maturity_steps.len());
        for m in 0..self.maturity_steps.len() {
            let mut row_mean = Vec::with_capacity(n_k);
            let mut row_se = Vec::with_capacity(n_k);
            for k in 0..n_k {
                let s = tally.sum[m * n_k + k];
                let sq = tally.sum_sq[m * n_k + k];
                let mean = s / n;
                let var = if n > 1.0 { ((sq / n - mean * mean) * n / (n - 1.0)).max(0.0) } else { 0.0 };
                row_mean.push(mean);
                row_se.push(libm::sqrt(var / n));
            }
            mean_price.push(row_mean);
            std_err.push(row_se);
        }
        let grid = PayoffGrid {
            maturities: spec.maturities.clone(),
            horizons: self.horizons(),
            strikes: spec.strikes.clone(),
            mean_price,
            std_err,
            n_paths: tally.paths as usize,
            seed: spec.base_seed,
            floor_events: tally.floor_events,
            total_steps: tally.steps,
        };
        let diagnostics = if self.diagnostics {
            let count = tally.steps as f64;
            let mean = tally.step_log_sum / count;
            let var = (tally.step_log_sq / count - mean * mean) * count / (count - 1.0).max(1.0);
            let sd = libm::sqrt(var.max(0.0));
            Some(PathDiagnostics {
                step_log_return_mean: mean,
                step_log_return_sd: sd,
                sigma_eff: sd / libm::sqrt(spec.dt),
                terminal: tally.terminal,
            })
        } else {
            None
        };
        SimulationRun { grid, diagnostics }
    }
}

/// Partial sums over a set of paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Tally {
    pub paths: u64,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    pub floor_events: u64,
    pub steps: u64,
    step_log_sum: f64,
    step_log_sq: f64,
    terminal: Vec<Vec<f64>>,
}

impl Tally {
    /// Appends `other`, which must cover the paths following those of `self`.
    pub fn merge(&mut self, other: Tally) {
        self.paths += other.paths;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self.floor_events += other.floor_events;
        self.steps += other.steps;
        self.step_log_sum += other.step_log_sum;
        self.step_log_sq += other.step_log_sq;
        for (a, b) in self.terminal.iter_mut().zip(other.terminal) {
            a.extend(b);
        }
    }
}

/// Monte Carlo call prices over a (maturity x strike) grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PayoffGrid {
    pub maturities: Vec<f64>,
    /// Horizon actually simulated for each maturity (whole time steps).
    pub horizons: Vec<f64>,
    pub strikes: Vec<f64>,
    /// `mean_price[m][k]`.
    pub mean_price: Vec<Vec<f64>>,
    pub std_err: Vec<Vec<f64>>,
    pub n_paths: usize,
    pub seed: u64,
    /// Price updates that hit the positivity floor.
    pub floor_events: u64,
    pub total_steps: u64,
}

impl PayoffGrid {
    pub fn floor_fraction(&self) -> f64 {
        if self.total_steps == 0 {
            0.0
        } else {
            self.floor_events as f64 / self.total_steps as f64
        }
    }

    pub fn maturity_index(&self, maturity: f64) -> Option<usize> {
        self.maturities.iter().position(|&t| crate::bs::close(t, maturity))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathDiagnostics {
    pub step_log_return_mean: f64,
    pub step_log_return_sd: f64,
    /// `step_log_return_sd / sqrt(dt)`.
    pub sigma_eff: f64,
    /// Prices at each maturity, in path order.
    pub terminal: Vec<Vec<f64>>,
}

impl PathDiagnostics {
    /// Moments of `log S` at maturity index `m`.
    pub fn log_price_moments(&self, m: usize) -> Option<Moments> {
        let logs: Vec<f64> = self.terminal.get(m)?.iter().map(|s| libm::log(*s)).collect();
        moments(&logs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub grid: PayoffGrid,
    pub diagnostics: Option<PathDiagnostics>,
}

/// Something that can evaluate a [`SimulationSpec`].
pub trait PathEngine {
    fn run(&self, spec: &SimulationSpec) -> Result<SimulationRun>;

    fn run_paths(&self, spec: &SimulationSpec) -> Result<PayoffGrid> {
        self.run(spec).map(|r| r.grid)
    }
}

impl<E: PathEngine + ?Sized> PathEngine for &E {
    fn run(&self, spec: &SimulationSpec) -> Result<SimulationRun> {
        (**self).run(spec)
    }
}

/// Runs every chunk in order on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialEngine;

impl PathEngine for SerialEngine {
    fn run(&self, spec: &SimulationSpec) -> Result<SimulationRun> {
        let plan = PathPlan::new(spec)?;
        let mut total = plan.empty_tally();
        for c in 0..spec.n_chunks() {
            total.merge(plan.simulate(spec.chunk_range(c)));
        }
        Ok(plan.finish(spec, total))
    }
}

/// `run_paths` on the serial engine.
pub fn run_paths(spec: &SimulationSpec) -> Result<PayoffGrid> {
    SerialEngine.run_paths(spec)
}

/// Normalised histogram of simulated prices.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `probs.len() + 1` bin edges.
    pub edges: Vec<f64>,
    /// Fraction of samples per bin; sums to 1.
    pub probs: Vec<f64>,
}

impl Histogram {
    pub fn from_samples(samples: &[f64], n_bins: usize) -> Result<Self> {
        if samples.is_empty() || n_bins == 0 {
            return Err(Error::Config("histogram needs samples and at least one bin".into()));
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Ok(Self { edges: vec![lo, hi], probs: vec![1.0] });
        }
        let width = (hi - lo) / n_bins as f64;
        let mut counts = vec![0u64; n_bins];
        for &s in samples {
            let b = (((s - lo) / width) as usize).min(n_bins - 1);
            counts[b] += 1;
        }
        let n = samples.len() as f64;
        Ok(Self {
            edges: (0..=n_bins).map(|i| lo + width * i as f64).collect(),
            probs: counts.into_iter().map(|c| c as f64 / n).collect(),
        })
    }
}

/// Distribution of the simulated price at `maturity`.
pub fn price_distribution<E: PathEngine>(
    engine: &E,
    spec: &SimulationSpec,
    maturity: f64,
    n_bins: usize,
) -> Result<Histogram> {
    let idx = spec
        .maturities
        .iter()
        .position(|&t| crate::bs::close(t, maturity))
        .ok_or_else(|| Error::Config(format!("maturity {maturity} is not on the simulation grid")))?;
    let spec = SimulationSpec { diagnostics: true, ..spec.clone() };
    let run = engine.run(&spec)?;
    let diag = run.diagnostics.ok_or_else(|| Error::Config("engine returned no diagnostics".into()))?;
    Histogram::from_samples(&diag.terminal[idx], n_bins)
}
