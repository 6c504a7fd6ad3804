use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::dynamics::{DriftTarget, DynamicsConfig};
use crate::error::{Error, Result};

/// The nine calibratable model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub sigma_alpha: f64,
    pub k_asym: f64,
    pub i_low: f64,
    pub i_up: f64,
    pub mu: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub b_par: f64,
    pub delta_market: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            sigma_alpha: 1.0,
            k_asym: 1.0,
            i_low: -1.0,
            i_up: 1.0,
            mu: 0.0,
            alpha0: 0.5,
            beta0: 0.5,
            b_par: 1.0,
            delta_market: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ParamName {
    SigmaAlpha,
    KAsym,
    ILow,
    IUp,
    Mu,
    Alpha0,
    Beta0,
    BPar,
    DeltaMarket,
}

impl ParamName {
    pub const ALL: [ParamName; 9] = [
        ParamName::SigmaAlpha,
        ParamName::KAsym,
        ParamName::ILow,
        ParamName::IUp,
        ParamName::Mu,
        ParamName::Alpha0,
        ParamName::Beta0,
        ParamName::BPar,
        ParamName::DeltaMarket,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::SigmaAlpha => "sigma_alpha",
            ParamName::KAsym => "k_asym",
            ParamName::ILow => "i_low",
            ParamName::IUp => "i_up",
            ParamName::Mu => "mu",
            ParamName::Alpha0 => "alpha0",
            ParamName::Beta0 => "beta0",
            ParamName::BPar => "b_par",
            ParamName::DeltaMarket => "delta_market",
        }
    }

    /// Probabilities and herding bounds are jittered and stepped additively;
    /// everything else relative to its magnitude.
    pub fn is_bounded(self) -> bool {
        matches!(self, ParamName::ILow | ParamName::IUp | ParamName::Alpha0 | ParamName::Beta0)
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        ParamName::ALL
            .into_iter()
            .find(|p| {
                p.as_str() == norm
                    || (norm == "sigma" && *p == ParamName::SigmaAlpha)
                    || (norm == "b" && *p == ParamName::BPar)
            })
            .ok_or_else(|| Error::Config(format!("unknown parameter {s:?}")))
    }
}

impl ModelParams {
    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::SigmaAlpha => self.sigma_alpha,
            ParamName::KAsym => self.k_asym,
            ParamName::ILow => self.i_low,
            ParamName::IUp => self.i_up,
            ParamName::Mu => self.mu,
            ParamName::Alpha0 => self.alpha0,
            ParamName::Beta0 => self.beta0,
            ParamName::BPar => self.b_par,
            ParamName::DeltaMarket => self.delta_market,
        }
    }

    pub fn set(&mut self, name: ParamName, value: f64) {
        let slot = match name {
            ParamName::SigmaAlpha => &mut self.sigma_alpha,
            ParamName::KAsym => &mut self.k_asym,
            ParamName::ILow => &mut self.i_low,
            ParamName::IUp => &mut self.i_up,
            ParamName::Mu => &mut self.mu,
            ParamName::Alpha0 => &mut self.alpha0,
            ParamName::Beta0 => &mut self.beta0,
            ParamName::BPar => &mut self.b_par,
            ParamName::DeltaMarket => &mut self.delta_market,
        };
        *slot = value;
    }

    /// Total amount by which the parameter invariants are violated; zero for
    /// a feasible vector.
    pub fn violation(&self) -> f64 {
        let mut v = 0.0;
        let below = |x: f64, lo: f64| if x < lo { lo - x } else { 0.0 };
        let above = |x: f64, hi: f64| if x > hi { x - hi } else { 0.0 };
        for x in [self.sigma_alpha, self.k_asym, self.b_par] {
            // strictly positive
            v += if x > 0.0 { 0.0 } else { 1e-3 - x };
        }
        for x in [self.i_low, self.i_up] {
            v += below(x, -1.0) + above(x, 1.0);
        }
        if self.i_low >= self.i_up {
            v += self.i_low - self.i_up + 1e-3;
        }
        for x in [self.alpha0, self.beta0] {
            v += below(x, 0.0) + above(x, 1.0);
        }
        let d0 = self.beta0 - self.alpha0;
        v += below(d0, self.i_low) + above(d0, self.i_up);
        let all = [
            self.sigma_alpha,
            self.k_asym,
            self.i_low,
            self.i_up,
            self.mu,
            self.alpha0,
            self.beta0,
            self.b_par,
            self.delta_market,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return f64::INFINITY;
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violation();
        if v > 0.0 {
            return Err(Error::Config(format!("model parameters violate their invariants by {v:.3e}: {self:?}")));
        }
        Ok(())
    }

    pub fn dynamics(&self, dt: f64, drift: DriftTarget, gamma_star: f64) -> DynamicsConfig {
        DynamicsConfig {
            sigma_alpha: self.sigma_alpha,
            k_asym: self.k_asym,
            i_low: self.i_low,
            i_up: self.i_up,
            dt,
            gamma_star,
            drift,
        }
    }

    /// Human-readable one-line summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (i, p) in ParamName::ALL.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{}={}", p, self.get(*p)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in ParamName::ALL {
            assert_eq!(p.as_str().parse::<ParamName>().unwrap(), p);
        }
        assert_eq!("sigma".parse::<ParamName>().unwrap(), ParamName::SigmaAlpha);
        assert!("gamma".parse::<ParamName>().is_err());
    }

    #[test]
    fn get_set() {
        let mut p = ModelParams::default();
        for (i, n) in ParamName::ALL.iter().enumerate() {
            p.set(*n, i as f64 * 0.01);
            assert_eq!(p.get(*n), i as f64 * 0.01);
        }
    }

    #[test]
    fn violations() {
        assert_eq!(ModelParams::default().violation(), 0.0);
        let bad = ModelParams { i_low: 0.2, i_up: 0.1, ..Default::default() };
        assert!(bad.violation() > 0.0);
        let outside = ModelParams { i_low: -0.1, i_up: 0.1, alpha0: 0.2, beta0: 0.5, ..Default::default() };
        assert!((outside.violation() - 0.2).abs() < 1e-12);
        assert!(ModelParams { sigma_alpha: 0.0, ..Default::default() }.validate().is_err());
        assert_eq!(ModelParams { mu: f64::NAN, ..Default::default() }.violation(), f64::INFINITY);
    }
}
