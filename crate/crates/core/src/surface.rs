//! Market implied-volatility surfaces and a shape classifier for smiles.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bs::{close, ModelSurface};
use crate::error::{Error, Result};

/// One quoted implied volatility.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfacePoint {
    pub maturity_years: f64,
    pub strike_over_spot: f64,
    pub implied_vol: f64,
}

/// Implied volatilities over a possibly ragged (maturity x strike) grid.
///
/// Maturities are in years (one month is 1/12, one trading day 1/250).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VolSurface {
    pub label: String,
    /// `YYYY-MM-DD`, or empty when unknown.
    pub as_of: String,
    pub spot: f64,
    pub points: Vec<SurfacePoint>,
}

/// A single reason a surface failed validation. `index` is the position in
/// `points`, or `None` for surface-level fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceIssue {
    pub index: Option<usize>,
    pub message: String,
}

impl fmt::Display for SurfaceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "point {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl VolSurface {
    pub fn new(label: impl Into<String>, as_of: impl Into<String>, spot: f64, points: Vec<SurfacePoint>) -> Self {
        Self { label: label.into(), as_of: as_of.into(), spot, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Every invariant violation, in point order.
    pub fn issues(&self) -> Vec<SurfaceIssue> {
        let mut out = Vec::new();
        if !(self.spot > 0.0) || !self.spot.is_finite() {
            out.push(SurfaceIssue { index: None, message: format!("spot must be positive, got {}", self.spot) });
        }
        if !self.as_of.is_empty() && !is_iso_date(&self.as_of) {
            out.push(SurfaceIssue { index: None, message: format!("as_of must be YYYY-MM-DD, got {:?}", self.as_of) });
        }
        for (i, p) in self.points.iter().enumerate() {
            let mut bad = |msg: String| out.push(SurfaceIssue { index: Some(i), message: msg });
            if !(p.maturity_years > 0.0) || !p.maturity_years.is_finite() {
                bad(format!("maturity_years must be positive, got {}", p.maturity_years));
            }
            if !(p.strike_over_spot > 0.0) || !p.strike_over_spot.is_finite() {
                bad(format!("strike_over_spot must be positive, got {}", p.strike_over_spot));
            }
            if !(p.implied_vol > 0.0) || !p.implied_vol.is_finite() {
                bad(format!("implied_vol must be positive, got {}", p.implied_vol));
            }
            if let Some(j) = self.points[..i].iter().position(|q| same_key(p, q)) {
                bad(format!(
                    "duplicate of point {j} at maturity {} and strike {}",
                    p.maturity_years, p.strike_over_spot
                ));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            return Ok(());
        }
        Err(Error::Validation { label: self.label.clone(), issues })
    }

    /// Distinct maturities, ascending.
    pub fn maturities(&self) -> Vec<f64> {
        distinct(self.points.iter().map(|p| p.maturity_years))
    }

    /// Distinct strikes across all maturities, ascending.
    pub fn strikes(&self) -> Vec<f64> {
        distinct(self.points.iter().map(|p| p.strike_over_spot))
    }

    pub fn get(&self, maturity: f64, strike: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| close(p.maturity_years, maturity) && close(p.strike_over_spot, strike))
            .map(|p| p.implied_vol)
    }

    /// Points of one maturity ordered by strike.
    pub fn slice(&self, maturity: f64) -> Vec<SurfacePoint> {
        let mut v: Vec<SurfacePoint> =
            self.points.iter().copied().filter(|p| close(p.maturity_years, maturity)).collect();
        v.sort_by(|a, b| a.strike_over_spot.total_cmp(&b.strike_over_spot));
        v
    }

    /// The sub-surface of one maturity.
    pub fn restrict(&self, maturity: f64) -> VolSurface {
        VolSurface { points: self.slice(maturity), ..self.clone() }
    }

    /// Market-style surface from model output, using the post-offset
    /// volatilities. Points with a non-positive volatility are dropped.
    pub fn from_model(label: impl Into<String>, as_of: impl Into<String>, model: &ModelSurface) -> Self {
        let points = model
            .points
            .iter()
            .filter(|p| p.sigma_imp > 0.0)
            .map(|p| SurfacePoint {
                maturity_years: p.maturity,
                strike_over_spot: p.strike_over_spot,
                implied_vol: p.sigma_imp,
            })
            .collect();
        Self::new(label, as_of, 1.0, points)
    }
}

fn same_key(a: &SurfacePoint, b: &SurfacePoint) -> bool {
    a.maturity_years == b.maturity_years && a.strike_over_spot == b.strike_over_spot
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| close(*a, *b));
    v
}

fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return false;
    }
    let digits = |r: core::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    if !(digits(0..4) && digits(5..7) && digits(8..10)) {
        return false;
    }
    let month = (b[5] - b'0') * 10 + (b[6] - b'0');
    let day = (b[8] - b'0') * 10 + (b[9] - b'0');
    (1..=12).contains(&month) && (1..=31).contains(&day)
}

/// Shape of implied volatility against strike.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SmileShape {
    /// Strictly decreasing.
    Skew,
    /// Strictly increasing.
    InvertedSkew,
    /// Strictly decreasing then strictly increasing, minimum inside.
    Smile,
    /// Anything else, including flat segments and fewer than three points.
    Irregular,
}

impl fmt::Display for SmileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmileShape::Skew => "skew",
            SmileShape::InvertedSkew => "inverted skew",
            SmileShape::Smile => "smile",
            SmileShape::Irregular => "irregular",
        })
    }
}

/// Classifies a strike-ordered volatility slice by the signs of its discrete
/// slopes.
pub fn classify_slice(vols: &[f64]) -> SmileShape {
    if vols.len() < 3 || vols.iter().any(|v| !v.is_finite()) {
        return SmileShape::Irregular;
    }
    let signs: Vec<i8> = vols
        .windows(2)
        .map(|w| match w[1].partial_cmp(&w[0]) {
            Some(core::cmp::Ordering::Greater) => 1,
            Some(core::cmp::Ordering::Less) => -1,
            _ => 0,
        })
        .collect();
    if signs.iter().all(|&s| s < 0) {
        return SmileShape::Skew;
    }
    if signs.iter().all(|&s| s > 0) {
        return SmileShape::InvertedSkew;
    }
    let turn = signs.iter().position(|&s| s >= 0).unwrap_or(signs.len());
    if turn > 0 && signs[turn..].iter().all(|&s| s > 0) {
        SmileShape::Smile
    } else {
        SmileShape::Irregular
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt(t: f64, k: f64, v: f64) -> SurfacePoint {
        SurfacePoint { maturity_years: t, strike_over_spot: k, implied_vol: v }
    }

    #[test]
    fn validation_lists_offending_points() {
        let s = VolSurface::new(
            "x",
            "2001-12-26",
            1.0,
            vec![pt(0.25, 1.0, 0.2), pt(0.25, 1.0, 0.3), pt(0.0, 0.9, 0.2), pt(0.5, 0.9, f64::NAN)],
        );
        let issues = s.issues();
        let idx: Vec<Option<usize>> = issues.iter().map(|i| i.index).collect();
        assert_eq!(idx, vec![Some(1), Some(2), Some(3)]);
        assert!(s.validate().is_err());
        assert!(VolSurface::new("ok", "", 1.0, vec![pt(0.25, 1.0, 0.2), pt(0.5, 1.0, 0.2)]).validate().is_ok());
        assert!(VolSurface::new("bad date", "2001-13-01", 1.0, vec![]).validate().is_err());
    }

    #[test]
    fn grid_accessors() {
        let s = VolSurface::new("x", "", 1.0, vec![pt(0.5, 1.1, 0.3), pt(0.25, 1.0, 0.2), pt(0.5, 0.9, 0.4)]);
        assert_eq!(s.maturities(), vec![0.25, 0.5]);
        assert_eq!(s.strikes(), vec![0.9, 1.0, 1.1]);
        assert_eq!(s.get(0.5, 0.9), Some(0.4));
        assert_eq!(s.get(0.25, 0.9), None);
        let sl = s.restrict(0.5);
        assert_eq!(sl.points, vec![pt(0.5, 0.9, 0.4), pt(0.5, 1.1, 0.3)]);
    }

    #[test]
    fn classifier_sign_patterns() {
        assert_eq!(classify_slice(&[0.3, 0.25, 0.2]), SmileShape::Skew);
        assert_eq!(classify_slice(&[0.2, 0.25, 0.3]), SmileShape::InvertedSkew);
        assert_eq!(classify_slice(&[0.3, 0.2, 0.25]), SmileShape::Smile);
        assert_eq!(classify_slice(&[0.3, 0.25, 0.2, 0.22, 0.3]), SmileShape::Smile);
        assert_eq!(classify_slice(&[0.2, 0.3, 0.25]), SmileShape::Irregular);
        assert_eq!(classify_slice(&[0.3, 0.2, 0.2, 0.3]), SmileShape::Irregular);
        assert_eq!(classify_slice(&[0.3, 0.2]), SmileShape::Irregular);
        assert_eq!(classify_slice(&[0.3, 0.2, 0.25, 0.24]), SmileShape::Irregular);
    }
}
