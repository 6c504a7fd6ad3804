//! Mean-field mathematics of a homogeneous community of bulls and bears.
//!
//! A community is a point `(alpha, beta)` of conditional probabilities: a
//! player turns bear with probability `alpha` after meeting a bull and with
//! probability `beta` after meeting a bear. Everything else (bull ratio,
//! herding, responsivity, mutual information) is derived from that point.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::batch_mean_error;
use crate::rng::{self, stream_rng};

/// Clamp margin keeping the bull ratio strictly inside `(0, 1)`.
pub const GAMMA_EPS: f64 = 1e-9;

const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PopulationState {
    /// P(bear | partner is bull).
    pub alpha: f64,
    /// P(bear | partner is bear).
    pub beta: f64,
}

impl PopulationState {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain { what: "alpha", value: alpha });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::Domain { what: "beta", value: beta });
        }
        Ok(Self { alpha, beta })
    }

    /// Herding `I = beta - alpha`.
    #[inline]
    pub fn herding(&self) -> f64 {
        self.beta - self.alpha
    }

    /// Unclamped steady-state bull fraction `(1 - beta) / (1 + alpha - beta)`.
    pub fn steady_state(&self) -> Result<f64> {
        let denom = 1.0 + self.alpha - self.beta;
        if libm::fabs(denom) < SINGULAR_TOL {
            return Err(Error::SingularPoint { alpha: self.alpha, beta: self.beta });
        }
        Ok((1.0 - self.beta) / denom)
    }
}

/// Fraction of bulls among all players, kept in `[GAMMA_EPS, 1 - GAMMA_EPS]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct BullRatio(f64);

impl BullRatio {
    pub const NEUTRAL: BullRatio = BullRatio(0.5);

    /// Clamps `gamma` into the admissible interval. NaN is rejected.
    pub fn clamped(gamma: f64) -> Result<Self> {
        if gamma.is_nan() {
            return Err(Error::Domain { what: "bull ratio", value: gamma });
        }
        Ok(Self(gamma.clamp(GAMMA_EPS, 1.0 - GAMMA_EPS)))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `log(gamma / (1 - gamma))`.
    #[inline]
    pub fn log_odds(self) -> f64 {
        libm::log(self.0 / (1.0 - self.0))
    }
}

/// Steady-state bull ratio of the community, `(1 - beta) / (1 + alpha - beta)`.
pub fn mean_field_gamma(state: PopulationState) -> Result<BullRatio> {
    BullRatio::clamped(state.steady_state()?)
}

/// Herding `I = beta - alpha`, in `[-1, 1]` for a valid state.
pub fn herding(state: PopulationState) -> f64 {
    state.herding()
}

/// Social responsivity `chi = I / (1 - I)`.
pub fn social_responsivity(state: PopulationState) -> Result<f64> {
    responsivity_of_herding(state.herding())
}

pub fn responsivity_of_herding(herding: f64) -> Result<f64> {
    if libm::fabs(1.0 - herding) < SINGULAR_TOL {
        return Err(Error::Divergent { herding });
    }
    Ok(herding / (1.0 - herding))
}

/// Linear response of the bull ratio to injecting a fraction `rho` of
/// unconditional players with average state `gamma_rho`.
pub fn injection_response(
    gamma_initial: BullRatio,
    rho: f64,
    gamma_rho: BullRatio,
    state: PopulationState,
) -> Result<BullRatio> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain { what: "injected fraction", value: rho });
    }
    let chi = social_responsivity(state)?;
    let g0 = gamma_initial.value();
    BullRatio::clamped(g0 + chi * rho * (gamma_rho.value() - g0))
}

/// The joint table of (player state, partner state) probabilities, indexed
/// `[player][partner]` with 0 = bull and 1 = bear.
pub fn interaction_table(state: PopulationState, gamma: BullRatio) -> [[f64; 2]; 2] {
    let (a, b, g) = (state.alpha, state.beta, gamma.value());
    [[(1.0 - a) * g, (1.0 - b) * (1.0 - g)], [a * g, b * (1.0 - g)]]
}

/// Mutual information, in bits, between the states of two interacting
/// players of the community.
pub fn mutual_information(state: PopulationState) -> Result<f64> {
    let gamma = mean_field_gamma(state)?;
    Ok(mutual_information_of_table(&interaction_table(state, gamma)))
}

/// Mutual information in bits of a 2x2 joint probability table, with
/// `0 log 0 = 0`.
pub fn mutual_information_of_table(omega: &[[f64; 2]; 2]) -> f64 {
    let rows = [omega[0][0] + omega[0][1], omega[1][0] + omega[1][1]];
    let cols = [omega[0][0] + omega[1][0], omega[0][1] + omega[1][1]];
    let mut e = 0.0;
    for p in 0..2 {
        for q in 0..2 {
            let w = omega[p][q];
            if w > 0.0 {
                e += w * libm::log2(w / (rows[p] * cols[q]));
            }
        }
    }
    // rounding can leave a tiny negative residue for independent players
    e.max(0.0)
}

/// Closed-form mutual information of a neutral (`gamma = 1/2`) community
/// with herding `I`: `log2[(1+I)^((1+I)/2) (1-I)^((1-I)/2)]`.
pub fn mutual_information_neutral(herding: f64) -> f64 {
    fn xlog2x(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            x * libm::log2(x)
        }
    }
    0.5 * (xlog2x(1.0 + herding) + xlog2x(1.0 - herding))
}

/// A finite community of explicit agents sharing `(alpha, beta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentPopulation {
    /// `true` = bull.
    pub states: Vec<bool>,
    pub alpha: f64,
    pub beta: f64,
}

impl AgentPopulation {
    /// `n_agents` players, the first `round(initial_gamma * n)` of them bulls.
    pub fn new(n_agents: usize, state: PopulationState, initial_gamma: f64) -> Self {
        let bulls = libm::round(initial_gamma.clamp(0.0, 1.0) * n_agents as f64) as usize;
        let states = (0..n_agents).map(|i| i < bulls).collect();
        Self { states, alpha: state.alpha, beta: state.beta }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn bulls(&self) -> usize {
        self.states.iter().filter(|&&s| s).count()
    }

    pub fn gamma(&self) -> f64 {
        self.bulls() as f64 / self.len() as f64
    }
}

/// Time-averaged empirical bull ratio of an agent simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub gamma: f64,
    /// Batch-means standard error of `gamma`.
    pub std_err: f64,
    pub final_gamma: f64,
}

/// Brute-force agent simulation of the conditional interaction rule.
///
/// Each interaction picks a random player `i` and a random partner `j != i`;
/// `i` becomes bear with probability `alpha` if `j` is bull and `beta` if `j`
/// is bear. The bull fraction is averaged over the second half of the run.
pub fn agent_oracle(mut pop: AgentPopulation, n_interactions: u64, rng_seed: u64) -> Result<OracleEstimate> {
    let n = pop.len();
    if n < 100 {
        return Err(Error::Config(alloc::format!("agent oracle needs at least 100 agents, got {n}")));
    }
    if n_interactions < 100 * n as u64 {
        return Err(Error::Config(alloc::format!(
            "agent oracle needs at least {} interactions, got {n_interactions}",
            100 * n
        )));
    }
    const BATCHES: usize = 32;
    let mut rng = stream_rng(rng_seed, 0);
    let mut bulls = pop.bulls();
    let burn_in = n_interactions / 2;
    let measured = n_interactions - burn_in;
    let batch_len = (measured / BATCHES as u64).max(1);
    let mut batch_means = Vec::with_capacity(BATCHES);
    let mut batch_sum = 0u128;
    let mut batch_count = 0u64;
    for step in 0..n_interactions {
        let i = rng::index(&mut rng, n);
        let mut j = rng::index(&mut rng, n - 1);
        if j >= i {
            j += 1;
        }
        let p_bear = if pop.states[j] { pop.alpha } else { pop.beta };
        let bull = rng::uniform(&mut rng) >= p_bear;
        if bull != pop.states[i] {
            if bull {
                bulls += 1;
            } else {
                bulls -= 1;
            }
            pop.states[i] = bull;
        }
        if step >= burn_in {
            batch_sum += bulls as u128;
            batch_count += 1;
            if batch_count == batch_len && batch_means.len() < BATCHES {
                batch_means.push(batch_sum as f64 / (batch_len as f64 * n as f64));
                batch_sum = 0;
                batch_count = 0;
            }
        }
    }
    let (gamma, std_err) = batch_mean_error(&batch_means, BATCHES);
    Ok(OracleEstimate { gamma, std_err, final_gamma: bulls as f64 / n as f64 })
}
