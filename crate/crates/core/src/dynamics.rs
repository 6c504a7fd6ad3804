//! Stochastic evolution of the community point `(alpha, beta)`.
//!
//! Each coordinate follows a bounded diffusion
//! `dx = -(x - x*) x(1-x) sigma^2 dt + sigma x(1-x) dz`, discretised with
//! explicit Euler steps. The herding `beta - alpha` is confined to
//! `[i_low, i_up]` by reflection; Euler overshoots of the unit box are
//! clamped.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::population::{mean_field_gamma, BullRatio, PopulationState};
use crate::rng::{standard_normal, stream_rng};

/// Margin keeping each conditional probability inside `(0, 1)`.
pub const PROB_EPS: f64 = 1e-6;

/// Default time step: one trading day.
pub const TRADING_DAY: f64 = 1.0 / 250.0;

/// Where the drift pulls the community.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DriftTarget {
    /// Point with the current herding whose bull ratio is `gamma_star`.
    #[default]
    SameHerding,
    /// `alpha* = beta* = 1/2` regardless of the current state.
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DynamicsConfig {
    /// Volatility of `alpha`, in 1/sqrt(year).
    pub sigma_alpha: f64,
    /// `sigma_beta = sigma_alpha * k_asym`.
    pub k_asym: f64,
    pub i_low: f64,
    pub i_up: f64,
    /// Time step in years.
    pub dt: f64,
    pub gamma_star: f64,
    pub drift: DriftTarget,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            sigma_alpha: 1.0,
            k_asym: 1.0,
            i_low: -1.0,
            i_up: 1.0,
            dt: TRADING_DAY,
            gamma_star: 0.5,
            drift: DriftTarget::SameHerding,
        }
    }
}

impl DynamicsConfig {
    #[inline]
    pub fn sigma_beta(&self) -> f64 {
        self.sigma_alpha * self.k_asym
    }

    /// Checks the parameter ranges. A zero `sigma_alpha` (frozen community)
    /// and a degenerate strip `i_low == i_up` are accepted.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.sigma_alpha, self.k_asym, self.i_low, self.i_up, self.dt, self.gamma_star]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config(format!("non-finite dynamics parameter in {self:?}")));
        }
        if self.sigma_alpha < 0.0 || self.k_asym < 0.0 {
            return Err(Error::Config(format!(
                "volatilities must be non-negative (sigma_alpha={}, k_asym={})",
                self.sigma_alpha, self.k_asym
            )));
        }
        if self.dt <= 0.0 {
            return Err(Error::Config(format!("time step must be positive, got {}", self.dt)));
        }
        if !(-1.0..=1.0).contains(&self.i_low) || !(-1.0..=1.0).contains(&self.i_up) || self.i_low > self.i_up {
            return Err(Error::Config(format!(
                "herding limits must satisfy -1 <= i_low <= i_up <= 1, got [{}, {}]",
                self.i_low, self.i_up
            )));
        }
        let reach = 1.0 - 2.0 * PROB_EPS;
        if self.i_low > reach || self.i_up < -reach {
            return Err(Error::Config(format!(
                "herding strip [{}, {}] does not intersect the interior of the unit square",
                self.i_low, self.i_up
            )));
        }
        if !(self.gamma_star > 0.0 && self.gamma_star < 1.0) {
            return Err(Error::Config(format!("gamma_star must lie in (0, 1), got {}", self.gamma_star)));
        }
        Ok(())
    }

    /// Drift equilibrium for the current state under this configuration.
    pub fn drift_targets(&self, state: PopulationState) -> (f64, f64) {
        match self.drift {
            DriftTarget::SameHerding => biased_drift_targets(state, self.gamma_star),
            DriftTarget::Center => (0.5, 0.5),
        }
    }
}

/// Drift equilibrium of a neutral population: same herding, bull ratio 1/2.
pub fn drift_targets(state: PopulationState) -> (f64, f64) {
    let i = state.herding();
    (0.5 - 0.5 * i, 0.5 + 0.5 * i)
}

/// Point with the herding of `state` whose mean-field bull ratio is
/// `gamma_star`.
pub fn biased_drift_targets(state: PopulationState, gamma_star: f64) -> (f64, f64) {
    if gamma_star == 0.5 {
        return drift_targets(state);
    }
    let i = state.herding();
    ((1.0 - i) * (1.0 - gamma_star), 1.0 - gamma_star * (1.0 - i))
}

/// Step probabilities `(P+, P-)` of the bull ratio in a population biased
/// towards `gamma_star`.
pub fn biased_step_probabilities(gamma: BullRatio, gamma_star: f64) -> (f64, f64) {
    let shift = gamma_star - gamma.value();
    (0.5 + shift, 0.5 - shift)
}

#[inline]
fn euler(x: f64, target: f64, sigma: f64, dt: f64, sqrt_dt: f64, z: f64) -> f64 {
    let w = x * (1.0 - x);
    x - (x - target) * w * dt * sigma * sigma + w * sqrt_dt * sigma * z
}

/// One Euler step driven by the standard normal pair `noise`, followed by
/// [`reflect_and_clamp`].
pub fn step(state: PopulationState, cfg: &DynamicsConfig, noise: [f64; 2]) -> PopulationState {
    let sqrt_dt = libm::sqrt(cfg.dt);
    step_with(state, cfg, sqrt_dt, noise)
}

#[inline]
pub(crate) fn step_with(
    state: PopulationState,
    cfg: &DynamicsConfig,
    sqrt_dt: f64,
    noise: [f64; 2],
) -> PopulationState {
    let (a_star, b_star) = cfg.drift_targets(state);
    let a = euler(state.alpha, a_star, cfg.sigma_alpha, cfg.dt, sqrt_dt, noise[0]);
    let b = euler(state.beta, b_star, cfg.sigma_beta(), cfg.dt, sqrt_dt, noise[1]);
    reflect_and_clamp(a, b, cfg)
}

fn reflect_into(mut d: f64, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    for _ in 0..64 {
        if d > hi {
            d = 2.0 * hi - d;
        } else if d < lo {
            d = 2.0 * lo - d;
        } else {
            return d;
        }
    }
    // far outside: fold with a triangle wave instead of bouncing
    let w = hi - lo;
    let mut t = libm::fmod(d - lo, 2.0 * w);
    if t < 0.0 {
        t += 2.0 * w;
    }
    if t > w {
        t = 2.0 * w - t;
    }
    (lo + t).clamp(lo, hi)
}

/// Repairs a raw Euler proposal: reflects the herding `d = beta - alpha` into
/// `[i_low, i_up]` keeping `s = alpha + beta`, then clamps both coordinates to
/// `[PROB_EPS, 1 - PROB_EPS]`. In the corners where clamping would push the
/// herding back out of the strip, `s` is clamped instead so that both
/// constraints hold.
pub fn reflect_and_clamp(alpha: f64, beta: f64, cfg: &DynamicsConfig) -> PopulationState {
    let (lo, hi) = (cfg.i_low, cfg.i_up);
    let d_raw = beta - alpha;
    let (mut a, mut b) = if d_raw >= lo && d_raw <= hi {
        (alpha, beta)
    } else {
        let s = alpha + beta;
        let d = reflect_into(d_raw, lo, hi);
        ((s - d) * 0.5, (s + d) * 0.5)
    };
    a = a.clamp(PROB_EPS, 1.0 - PROB_EPS);
    b = b.clamp(PROB_EPS, 1.0 - PROB_EPS);
    let d = b - a;
    if d < lo || d > hi {
        let reach = 1.0 - 2.0 * PROB_EPS;
        let d = reflect_into(d_raw, lo, hi).clamp(lo.max(-reach), hi.min(reach));
        let s = (alpha + beta).clamp(2.0 * PROB_EPS + libm::fabs(d), 2.0 - 2.0 * PROB_EPS - libm::fabs(d));
        a = ((s - d) * 0.5).clamp(PROB_EPS, 1.0 - PROB_EPS);
        b = ((s + d) * 0.5).clamp(PROB_EPS, 1.0 - PROB_EPS);
        // settle rounding at the strip edges
        for _ in 0..8 {
            let d = b - a;
            if d > hi {
                if b > PROB_EPS {
                    b = b.next_down()
                } else {
                    a = a.next_up()
                }
            } else if d < lo {
                if a > PROB_EPS {
                    a = a.next_down()
                } else {
                    b = b.next_up()
                }
            } else {
                break;
            }
        }
    }
    PopulationState { alpha: a, beta: b }
}

/// Trajectory of the community and its bull ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityPath {
    pub times: Vec<f64>,
    pub states: Vec<PopulationState>,
    pub gammas: Vec<BullRatio>,
}

impl CommunityPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Number of Euler steps covering `horizon`.
pub fn steps_for(horizon: f64, dt: f64) -> usize {
    // tolerate representation error so that e.g. 0.5 / (1/250) is 125 steps
    let x = horizon / dt;
    let r = libm::round(x);
    if libm::fabs(x - r) < 1e-9 * r.max(1.0) {
        r as usize
    } else {
        libm::ceil(x) as usize
    }
}

/// Places `(alpha0, beta0)` inside the allowed region.
pub fn initial_state(alpha0: f64, beta0: f64, cfg: &DynamicsConfig) -> Result<PopulationState> {
    cfg.validate()?;
    if !alpha0.is_finite() || !beta0.is_finite() {
        return Err(Error::Config(format!("non-finite initial point ({alpha0}, {beta0})")));
    }
    Ok(reflect_and_clamp(alpha0, beta0, cfg))
}

/// Simulates the community from `(alpha0, beta0)` over `horizon` years.
///
/// The path holds the initial point followed by one state per step. Noise is
/// drawn from stream 0 of `rng_seed`, alpha's draw first.
pub fn simulate_community(
    alpha0: f64,
    beta0: f64,
    cfg: &DynamicsConfig,
    horizon: f64,
    rng_seed: u64,
) -> Result<CommunityPath> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    let mut state = initial_state(alpha0, beta0, cfg)?;
    let n = steps_for(horizon, cfg.dt);
    let sqrt_dt = libm::sqrt(cfg.dt);
    let mut rng = stream_rng(rng_seed, 0);
    let mut path = CommunityPath {
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        gammas: Vec::with_capacity(n + 1),
    };
    path.times.push(0.0);
    path.states.push(state);
    path.gammas.push(mean_field_gamma(state)?);
    for k in 1..=n {
        let z1 = standard_normal(&mut rng);
        let z2 = standard_normal(&mut rng);
        state = step_with(state, cfg, sqrt_dt, [z1, z2]);
        path.times.push(k as f64 * cfg.dt);
        path.states.push(state);
        path.gammas.push(mean_field_gamma(state)?);
    }
    Ok(path)
}
