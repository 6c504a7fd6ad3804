use alloc::string::String;
use alloc::vec::Vec;

use crate::surface::SurfaceIssue;

/// Errors raised by the model, pricing and calibration routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// `1 + alpha - beta` vanishes: the fully correlated state, where the
    /// bull ratio is indeterminate.
    #[error("singular point at alpha={alpha}, beta={beta}: bull ratio is indeterminate")]
    SingularPoint { alpha: f64, beta: f64 },

    /// Social responsivity diverges at herding `I = 1`.
    #[error("social responsivity diverges at herding {herding}")]
    Divergent { herding: f64 },

    #[error("value {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate}, error {error:e})")]
    Quadrature { tol: f64, estimate: f64, error: f64 },

    /// Price outside the open no-arbitrage band `(intrinsic, forward)`.
    #[error("price {price} outside arbitrage band ({lower}, {upper})")]
    OutOfBand { price: f64, lower: f64, upper: f64 },

    #[error("implied volatility did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// Every calibration descent stopped at its starting simplex.
    #[error("no calibration run improved on its initial simplex")]
    NoImprovement,

    /// A surface breaks its invariants; every offending point is listed.
    #[error("invalid surface {label:?}: {}", list(issues))]
    Validation { label: String, issues: Vec<SurfaceIssue> },

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

fn list(issues: &[SurfaceIssue]) -> String {
    let mut out = String::new();
    for (i, issue) in issues.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(&alloc::format!("{issue}"));
    }
    out
}
