//! Market function: translates the vote outcome into stock prices.

use crate::error::{Error, Result};
use crate::population::BullRatio;

/// Floor applied when an update would drive the price to or below zero.
pub const PRICE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceState {
    /// Stock price, normalised so that the initial price is 1.
    pub s: f64,
    /// Vote-to-price coefficient `B`.
    pub b_par: f64,
}

impl PriceState {
    pub fn new(b_par: f64) -> Self {
        Self { s: 1.0, b_par }
    }
}

/// Outcome of a single price update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceStep {
    pub price: PriceState,
    /// The raw update fell below [`PRICE_FLOOR`].
    pub floored: bool,
}

fn check_open_unit(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain { what: "bull ratio", value: gamma })
    }
}

/// `F(gamma) = B log(gamma / (1 - gamma))`.
pub fn market_function(gamma: f64, b: f64) -> Result<f64> {
    check_open_unit(gamma)?;
    Ok(b * libm::log(gamma / (1.0 - gamma)))
}

/// `S_next = S + S B [logit(gamma_next) - logit(gamma_prev)]`, floored.
pub fn price_update(price: PriceState, gamma_prev: BullRatio, gamma_next: BullRatio) -> PriceStep {
    update_from_log_odds(price, gamma_next.log_odds() - gamma_prev.log_odds())
}

#[inline]
pub(crate) fn update_from_log_odds(price: PriceState, delta_log_odds: f64) -> PriceStep {
    let s = price.s + price.s * delta_log_odds * price.b_par;
    if s < PRICE_FLOOR {
        PriceStep { price: PriceState { s: PRICE_FLOOR, ..price }, floored: true }
    } else {
        PriceStep { price: PriceState { s, ..price }, floored: false }
    }
}

/// Closed-form integral of the price map, `S = (gamma / (1 - gamma))^B`.
pub fn integrated_price(gamma: f64, b: f64) -> Result<f64> {
    check_open_unit(gamma)?;
    Ok(libm::pow(gamma / (1.0 - gamma), b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: f64) -> BullRatio {
        BullRatio::clamped(x).unwrap()
    }

    #[test]
    fn market_function_examples() {
        assert_eq!(market_function(0.5, 1.3).unwrap(), 0.0);
        assert!((market_function(0.75, 1.0).unwrap() - libm::log(3.0)).abs() < 1e-15);
        let e = core::f64::consts::E;
        assert!((market_function(e / (1.0 + e), 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(market_function(0.0, 1.0).is_err());
        assert!(market_function(1.0, 1.0).is_err());
        assert!(market_function(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn price_update_examples() {
        let p = PriceState::new(1.0);
        assert_eq!(price_update(p, g(0.3), g(0.3)).price.s, 1.0);
        let up = price_update(p, g(0.5), g(0.75)).price.s;
        assert!((up - (1.0 + libm::log(3.0))).abs() < 1e-12);
        assert!((up - 2.0986).abs() < 1e-4);
        let s = price_update(PriceState::new(1.09), g(0.5), g(0.52)).price.s;
        assert!((s - (1.0 + 1.09 * libm::log(0.52 / 0.48))).abs() < 1e-12);
        assert!((s - 1.0873).abs() < 1e-4);
    }

    #[test]
    fn floor_engages_on_crash() {
        let step = price_update(PriceState::new(1.0), g(0.9), g(0.1));
        assert!(step.floored);
        assert_eq!(step.price.s, PRICE_FLOOR);
    }

    #[test]
    fn integrated_price_examples() {
        assert_eq!(integrated_price(0.5, 2.0).unwrap(), 1.0);
        assert!((integrated_price(0.75, 1.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((integrated_price(0.75, 2.0).unwrap() - 9.0).abs() < 1e-12);
    }
}
