//! Black-Scholes reference machinery: lognormal density, call prices by
//! closed form and by quadrature, implied-volatility inversion and the
//! constant market offset.
//!
//! Prices are undiscounted expectations under the lognormal law with drift
//! `mu` (the forward convention used by the Monte Carlo average). The
//! discounted variant multiplies by `exp(-mu t)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{integrate, norm_cdf, norm_pdf, SQRT_2PI};
use crate::mc::PayoffGrid;

pub const IV_LOWER: f64 = 1e-6;
pub const IV_UPPER: f64 = 20.0;
/// Hard ceiling for the bracket expansion near the top of the band.
const IV_CEILING: f64 = 1e3;
pub const IV_MAX_ITER: usize = 200;
pub const IV_DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsInputs {
    pub spot: f64,
    pub strike: f64,
    /// Drift ("prime") rate per year.
    pub mu: f64,
    pub sigma: f64,
    /// Years.
    pub maturity: f64,
}

impl BsInputs {
    pub fn forward(&self) -> f64 {
        self.spot * libm::exp(self.mu * self.maturity)
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [("spot", self.spot), ("strike", self.strike), ("maturity", self.maturity)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain { what, value: v });
            }
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::Domain { what: "sigma", value: self.sigma });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PriceConvention {
    #[default]
    Undiscounted,
    Discounted,
}

impl PriceConvention {
    fn factor(self, inputs: &BsInputs) -> f64 {
        match self {
            PriceConvention::Undiscounted => 1.0,
            PriceConvention::Discounted => libm::exp(-inputs.mu * inputs.maturity),
        }
    }
}

/// Vanilla call payoff `max(S - K, 0)`.
#[inline]
pub fn call_payoff(s: f64, k: f64) -> f64 {
    (s - k).max(0.0)
}

/// Lognormal density of the price at `maturity` for a process started at
/// `spot` with drift `mu` and volatility `sigma`.
pub fn lognormal_density(s: f64, inputs: &BsInputs) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let v = inputs.sigma * libm::sqrt(inputs.maturity);
    let m = libm::log(inputs.spot) + (inputs.mu - 0.5 * inputs.sigma * inputs.sigma) * inputs.maturity;
    let z = (libm::log(s) - m) / v;
    libm::exp(-0.5 * z * z) / (s * v * SQRT_2PI)
}

fn d1(inputs: &BsInputs) -> f64 {
    let v = inputs.sigma * libm::sqrt(inputs.maturity);
    (libm::log(inputs.spot / inputs.strike) + (inputs.mu + 0.5 * inputs.sigma * inputs.sigma) * inputs.maturity) / v
}

/// Undiscounted call value `F N(d1) - K N(d2)` with `F = spot exp(mu t)`.
pub fn call_price_closed(inputs: &BsInputs) -> f64 {
    let f = inputs.forward();
    let v = inputs.sigma * libm::sqrt(inputs.maturity);
    if v <= 0.0 || !v.is_finite() {
        return call_payoff(f, inputs.strike);
    }
    let d1 = d1(inputs);
    f * norm_cdf(d1) - inputs.strike * norm_cdf(d1 - v)
}

pub fn call_price(inputs: &BsInputs, convention: PriceConvention) -> f64 {
    convention.factor(inputs) * call_price_closed(inputs)
}

/// Sensitivity of [`call_price_closed`] to `sigma`.
pub fn vega(inputs: &BsInputs) -> f64 {
    let v = inputs.sigma * libm::sqrt(inputs.maturity);
    if v <= 0.0 {
        return 0.0;
    }
    inputs.forward() * norm_pdf(d1(inputs)) * libm::sqrt(inputs.maturity)
}

/// Call value by adaptive quadrature of the payoff against
/// [`lognormal_density`].
pub fn call_price_integral(inputs: &BsInputs, abs_tol: f64) -> Result<f64> {
    inputs.validate()?;
    let v = inputs.sigma * libm::sqrt(inputs.maturity);
    if v <= 0.0 {
        return Ok(call_payoff(inputs.forward(), inputs.strike));
    }
    let tol = abs_tol.max(1e-10);
    let m = libm::log(inputs.spot) + (inputs.mu - 0.5 * inputs.sigma * inputs.sigma) * inputs.maturity;
    let lower = libm::log(inputs.strike).max(m - 14.0 * v);
    let upper = m + v * v + 14.0 * v;
    if lower >= upper {
        return Ok(0.0);
    }
    // log-price substitution keeps narrow densities resolvable
    let integrand = |x: f64| {
        let s = libm::exp(x);
        call_payoff(s, inputs.strike) * lognormal_density(s, inputs) * s
    };
    let body = integrate(integrand, lower, upper, tol)?;
    // below m - 14v the density is negligible but the payoff is not zero
    let log_k = libm::log(inputs.strike);
    if log_k < lower {
        let head = |x: f64| {
            let s = libm::exp(x);
            (s - inputs.strike) * lognormal_density(s, inputs) * s
        };
        let far = (m - 40.0 * v).max(log_k);
        return Ok(body + integrate(head, far, lower, tol)?);
    }
    Ok(body)
}

/// Open no-arbitrage band `(intrinsic, forward)` for the call price.
pub fn arbitrage_band(inputs: &BsInputs, convention: PriceConvention) -> (f64, f64) {
    let df = convention.factor(inputs);
    let f = inputs.forward();
    (df * call_payoff(f, inputs.strike), df * f)
}

/// Black-Scholes volatility reproducing `price`; `inputs.sigma` is ignored.
///
/// Safeguarded Newton iteration on `[1e-6, 20]` with bisection fallback. The
/// upper end is widened when the price sits very close to the forward.
pub fn implied_vol(price: f64, inputs: &BsInputs, tol: f64, convention: PriceConvention) -> Result<f64> {
    inputs.validate()?;
    let (lower, upper) = arbitrage_band(inputs, convention);
    if !(price > lower && price < upper) {
        return Err(Error::OutOfBand { price, lower, upper });
    }
    let df = convention.factor(inputs);
    let target = price / df;
    let tol_u = tol / df;
    let f = |sigma: f64| call_price_closed(&inputs.with_sigma(sigma)) - target;

    let mut lo = IV_LOWER;
    let mut hi = IV_UPPER;
    if f(lo) >= 0.0 {
        return Ok(lo);
    }
    while f(hi) < 0.0 {
        if hi >= IV_CEILING {
            return Err(Error::NoConvergence { iterations: 0 });
        }
        lo = hi;
        hi *= 2.0;
    }

    let fwd = inputs.forward();
    let guess = libm::sqrt(2.0 * libm::fabs(libm::log(fwd / inputs.strike)) / inputs.maturity).max(0.2);
    let mut sigma = guess.clamp(lo, hi);
    for _ in 0..IV_MAX_ITER {
        let fx = f(sigma);
        if fx == 0.0 {
            return Ok(sigma);
        }
        if fx < 0.0 {
            lo = sigma;
        } else {
            hi = sigma;
        }
        let vg = vega(&inputs.with_sigma(sigma));
        let newton = sigma - fx / vg;
        let next = if vg > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = libm::fabs(next - sigma);
        sigma = next;
        if step <= 1e-13 * (1.0 + sigma) || hi - lo <= 1e-14 * (1.0 + sigma) {
            if libm::fabs(f(sigma)) <= tol_u {
                return Ok(sigma);
            }
            break;
        }
    }
    if libm::fabs(f(sigma)) <= tol_u {
        return Ok(sigma);
    }
    Err(Error::NoConvergence { iterations: IV_MAX_ITER })
}

/// `sigma_imp = sigma_players - delta_market`. Non-positive results are
/// returned as is.
pub fn apply_market_offset(sigma_players: f64, delta_market: f64) -> f64 {
    sigma_players - delta_market
}

/// One implied volatility of a simulated surface.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelVolPoint {
    pub maturity: f64,
    pub strike_over_spot: f64,
    /// Inverted volatility before the market offset.
    pub sigma_players: f64,
    /// `sigma_players - delta_market`.
    pub sigma_imp: f64,
    /// Delta-method standard error of the inverted volatility.
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSurface {
    pub points: Vec<ModelVolPoint>,
    pub delta_market: f64,
    /// Cells whose Monte Carlo price could not be inverted.
    pub missing: usize,
}

impl ModelSurface {
    /// The point at (`maturity`, `strike`) if it was inverted.
    pub fn get(&self, maturity: f64, strike: f64) -> Option<&ModelVolPoint> {
        self.points.iter().find(|p| close(p.maturity, maturity) && close(p.strike_over_spot, strike))
    }

    /// Volatilities of one maturity ordered by strike.
    pub fn slice(&self, maturity: f64) -> Vec<ModelVolPoint> {
        let mut v: Vec<ModelVolPoint> = self.points.iter().copied().filter(|p| close(p.maturity, maturity)).collect();
        v.sort_by(|a, b| a.strike_over_spot.total_cmp(&b.strike_over_spot));
        v
    }

    /// Re-applies a different offset to every point.
    pub fn with_offset(&self, delta_market: f64) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| ModelVolPoint { sigma_imp: apply_market_offset(p.sigma_players, delta_market), ..*p })
            .collect();
        Self { points, delta_market, missing: self.missing }
    }
}

pub(crate) fn close(a: f64, b: f64) -> bool {
    libm::fabs(a - b) <= 1e-9 * (1.0 + libm::fabs(a).max(libm::fabs(b)))
}

/// Inverts every cell of a payoff grid (spot 1) and applies the offset.
///
/// Each cell is inverted at the horizon actually simulated for its maturity.
/// Cells outside the arbitrage band or without convergence are counted in
/// `missing` rather than filled in.
pub fn surface_from_payoffs(
    grid: &PayoffGrid,
    mu: f64,
    delta_market: f64,
    convention: PriceConvention,
) -> ModelSurface {
    let mut points = Vec::with_capacity(grid.maturities.len() * grid.strikes.len());
    let mut missing = 0;
    for (m, &maturity) in grid.maturities.iter().enumerate() {
        let horizon = grid.horizons[m];
        for (k, &strike) in grid.strikes.iter().enumerate() {
            let inputs = BsInputs { spot: 1.0, strike, mu, sigma: 0.0, maturity: horizon };
            let price = convention.factor(&inputs) * grid.mean_price[m][k];
            match implied_vol(price, &inputs, IV_DEFAULT_TOL, convention) {
                Ok(sigma) => {
                    let vg = convention.factor(&inputs) * vega(&inputs.with_sigma(sigma));
                    let se = convention.factor(&inputs) * grid.std_err[m][k];
                    points.push(ModelVolPoint {
                        maturity,
                        strike_over_spot: strike,
                        sigma_players: sigma,
                        sigma_imp: apply_market_offset(sigma, delta_market),
                        std_err: if vg > 0.0 { se / vg } else { f64::INFINITY },
                    });
                }
                Err(_) => missing += 1,
            }
        }
    }
    ModelSurface { points, delta_market, missing }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inp(k: f64, sigma: f64, t: f64) -> BsInputs {
        BsInputs { spot: 1.0, strike: k, mu: 0.0, sigma, maturity: t }
    }

    #[test]
    fn payoff_examples() {
        assert!((call_payoff(1.2, 1.0) - 0.2).abs() < 1e-15);
        assert_eq!(call_payoff(0.8, 1.0), 0.0);
    }

    #[test]
    fn closed_form_limits() {
        assert_eq!(call_price_closed(&inp(1.0, 0.0, 1.0)), 0.0);
        let fwd = BsInputs { mu: 0.05, ..inp(1e-12, 0.3, 2.0) };
        assert!((call_price_closed(&fwd) - libm::exp(0.1)).abs() < 1e-10);
        // reference value from quadrature, frozen
        assert!((call_price_closed(&inp(1.0, 0.2, 1.0)) - 0.079_655_674_554_057_9).abs() < 1e-12);
    }

    #[test]
    fn integral_matches_reference() {
        let v = call_price_integral(&inp(1.0, 0.2, 1.0), 1e-10).unwrap();
        assert!((v - 0.07966).abs() < 1e-5);
        assert!((v - call_price_closed(&inp(1.0, 0.2, 1.0))).abs() < 1e-9);
        let zero_vol = BsInputs { mu: 0.04, ..inp(0.9, 0.0, 1.0) };
        assert_eq!(call_price_integral(&zero_vol, 1e-10).unwrap(), libm::exp(0.04) - 0.9);
    }

    #[test]
    fn density_integrates_to_one() {
        let i = BsInputs { spot: 1.0, strike: 1.0, mu: 0.045, sigma: 0.2, maturity: 1.0 };
        let total = integrate(|x: f64| lognormal_density(libm::exp(x), &i) * libm::exp(x), -10.0, 10.0, 1e-12).unwrap();
        assert!((total - 1.0).abs() < 1e-8);
        assert_eq!(lognormal_density(0.0, &i), 0.0);
    }

    #[test]
    fn density_mode_in_log_space() {
        let i = BsInputs { spot: 1.3, strike: 1.0, mu: 0.05, sigma: 0.4, maturity: 0.7 };
        let mode = libm::log(1.3) + (0.05 - 0.08) * 0.7;
        let g = |x: f64| lognormal_density(libm::exp(x), &i) * libm::exp(x);
        assert!(g(mode) > g(mode + 1e-3) && g(mode) > g(mode - 1e-3));
    }

    #[test]
    fn implied_vol_round_trips() {
        for sigma in [0.2, 1.37] {
            let i = BsInputs { mu: 0.045, ..inp(1.1, sigma, 0.5) };
            let p = call_price_closed(&i);
            let back = implied_vol(p, &i, IV_DEFAULT_TOL, PriceConvention::Undiscounted).unwrap();
            assert!((back - sigma).abs() < 1e-6, "{sigma} -> {back}");
            let pd = call_price(&i, PriceConvention::Discounted);
            let back = implied_vol(pd, &i, IV_DEFAULT_TOL, PriceConvention::Discounted).unwrap();
            assert!((back - sigma).abs() < 1e-6);
        }
    }

    #[test]
    fn implied_vol_band_and_blow_up() {
        let i = inp(0.8, 0.0, 0.25);
        assert!(matches!(
            implied_vol(0.19, &i, IV_DEFAULT_TOL, PriceConvention::Undiscounted),
            Err(Error::OutOfBand { .. })
        ));
        let intrinsic = call_payoff(1.0, 0.8);
        assert!(implied_vol(intrinsic, &i, IV_DEFAULT_TOL, PriceConvention::Undiscounted).is_err());
        assert!(implied_vol(1.0, &i, IV_DEFAULT_TOL, PriceConvention::Undiscounted).is_err());
        let a = implied_vol(1.0 - 1e-3, &i, IV_DEFAULT_TOL, PriceConvention::Undiscounted).unwrap();
        let b = implied_vol(1.0 - 1e-4, &i, IV_DEFAULT_TOL, PriceConvention::Undiscounted).unwrap();
        assert!(a > 5.0 && b > a, "{a} {b}");
    }

    #[test]
    fn offset_examples() {
        assert_eq!(apply_market_offset(0.3, 0.0), 0.3);
        assert!((apply_market_offset(1.5, 0.99) - 0.51).abs() < 1e-15);
        assert!(apply_market_offset(0.5, 0.99) < 0.0);
    }
}
