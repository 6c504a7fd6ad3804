//! Writers and readers for payoff grids, community paths, calibration
//! reports and population diagnostics.

use std::fmt::Write as _;
use std::path::Path;

use herdprice_core::calibration::CalibrationReport;
use herdprice_core::dynamics::{steps_for, CommunityPath};
use herdprice_core::mc::PayoffGrid;
use herdprice_core::population::{mean_field_gamma, mutual_information, social_responsivity, PopulationState};
use serde::{Deserialize, Serialize};

use crate::format::fmt_sig;

/// On-disk payoff grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffFile {
    pub maturities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<f64>>,
    pub strikes: Vec<f64>,
    pub mean: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub n_paths: usize,
    pub seed: u64,
    pub floor_events: u64,
    #[serde(default)]
    pub total_steps: u64,
    #[serde(default)]
    pub floor_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl PayoffFile {
    pub fn new(grid: &PayoffGrid, config: Option<serde_json::Value>) -> Self {
        Self {
            maturities: grid.maturities.clone(),
            horizons: Some(grid.horizons.clone()),
            strikes: grid.strikes.clone(),
            mean: grid.mean_price.clone(),
            stderr: grid.std_err.clone(),
            n_paths: grid.n_paths,
            seed: grid.seed,
            floor_events: grid.floor_events,
            total_steps: grid.total_steps,
            floor_fraction: grid.floor_fraction(),
            config,
        }
    }

    /// Back to a grid. Missing horizons are rebuilt from the time step `dt`.
    pub fn into_grid(self, dt: f64) -> Result<PayoffGrid, String> {
        let n_m = self.maturities.len();
        let n_k = self.strikes.len();
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n_m && rows.iter().all(|r| r.len() == n_k);
        if !shape_ok(&self.mean) || !shape_ok(&self.stderr) {
            return Err(format!("payoff grid must be {n_m} x {n_k} (maturities x strikes)"));
        }
        let horizons = match self.horizons {
            Some(h) if h.len() == n_m => h,
            Some(_) => return Err("horizons must have one entry per maturity".into()),
            None => self.maturities.iter().map(|&t| steps_for(t, dt).max(1) as f64 * dt).collect(),
        };
        Ok(PayoffGrid {
            maturities: self.maturities,
            horizons,
            strikes: self.strikes,
            mean_price: self.mean,
            std_err: self.stderr,
            n_paths: self.n_paths,
            seed: self.seed,
            floor_events: self.floor_events,
            total_steps: self.total_steps,
        })
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

fn config_line(out: &mut String, config: Option<&serde_json::Value>) {
    if let Some(c) = config {
        writeln!(out, "# config: {c}").unwrap();
    }
}

/// `t,alpha,beta,gamma` rows of a community path.
pub fn path_csv(path: &CommunityPath, config: Option<&serde_json::Value>) -> String {
    let mut out = String::new();
    config_line(&mut out, config);
    out.push_str("t,alpha,beta,gamma\n");
    for ((t, s), g) in path.times.iter().zip(&path.states).zip(&path.gammas) {
        writeln!(out, "{},{},{},{}", fmt_sig(*t), fmt_sig(s.alpha), fmt_sig(s.beta), fmt_sig(g.value())).unwrap();
    }
    out
}

/// Implied-volatility rows of one maturity, for plotting.
pub fn plot_csv(rows: &[(f64, f64, f64, f64)], config: Option<&serde_json::Value>) -> String {
    let mut out = String::new();
    config_line(&mut out, config);
    out.push_str("strike_over_spot,sigma_imp,sigma_players,std_err\n");
    for (k, imp, players, se) in rows {
        writeln!(out, "{},{},{},{}", fmt_sig(*k), fmt_sig(*imp), fmt_sig(*players), fmt_sig(*se)).unwrap();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationFile<'a> {
    pub config: serde_json::Value,
    #[serde(flatten)]
    pub report: &'a CalibrationReport,
}

/// Population quantities at one point of the `(alpha, beta)` square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationRow {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: Option<f64>,
    pub herding: f64,
    pub responsivity: Option<f64>,
    pub mutual_information: Option<f64>,
    pub singular: bool,
}

pub fn population_row(alpha: f64, beta: f64) -> PopulationRow {
    let state = PopulationState { alpha, beta };
    let gamma = mean_field_gamma(state).ok().map(|g| g.value());
    PopulationRow {
        alpha,
        beta,
        gamma,
        herding: state.herding(),
        responsivity: social_responsivity(state).ok(),
        mutual_information: mutual_information(state).ok(),
        singular: gamma.is_none(),
    }
}

/// Rows on a square grid with `step` spacing, alpha varying slowest.
pub fn population_grid(step: f64) -> Result<Vec<PopulationRow>, String> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(format!("grid step must be in (0, 1], got {step}"));
    }
    let n = (1.0 / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        for j in 0..=n {
            let a = (i as f64 * step).min(1.0);
            let b = (j as f64 * step).min(1.0);
            rows.push(population_row(a, b));
        }
    }
    Ok(rows)
}

pub fn population_csv(rows: &[PopulationRow], config: Option<&serde_json::Value>) -> String {
    let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
    let mut out = String::new();
    config_line(&mut out, config);
    out.push_str("alpha,beta,gamma,herding,responsivity,mutual_information,status\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_sig(r.alpha),
            fmt_sig(r.beta),
            opt(r.gamma),
            fmt_sig(r.herding),
            opt(r.responsivity),
            opt(r.mutual_information),
            if r.singular {
                "singular"
            } else if r.responsivity.is_none() {
                "divergent"
            } else {
                "ok"
            }
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_441_rows_and_flags_the_corner() {
        let rows = population_grid(0.05).unwrap();
        assert_eq!(rows.len(), 441);
        let corner = rows.iter().find(|r| r.alpha == 0.0 && r.beta == 1.0).unwrap();
        assert!(corner.singular);
        for r in rows.iter().filter(|r| r.alpha == r.beta) {
            assert!(r.mutual_information.unwrap().abs() < 1e-12, "{r:?}");
        }
        let text = population_csv(&rows, None);
        assert_eq!(text.lines().count(), 442);
        assert!(text.contains("0,1.00000000,,1.00000000,,,singular"));
    }
}
