use herdprice_core::bs::{call_price_closed, implied_vol, BsInputs, PriceConvention};
use herdprice_core::dynamics::{reflect_and_clamp, step, DynamicsConfig};
use herdprice_core::population::{
    interaction_table, mean_field_gamma, mutual_information, mutual_information_of_table, responsivity_of_herding,
    social_responsivity, BullRatio, PopulationState,
};
use herdprice_core::pricemap::{market_function, price_update, PriceState};
use herdprice_core::surface::{classify_slice, SmileShape};
use proptest::prelude::*;

fn config(i_low: f64, width: f64, sigma: f64) -> DynamicsConfig {
    DynamicsConfig { i_low, i_up: (i_low + width).min(1.0), sigma_alpha: sigma, ..DynamicsConfig::default() }
}

proptest! {
    #[test]
    fn steps_stay_inside_the_strip(
        a in 0.0..=1.0f64, b in 0.0..=1.0f64,
        i_low in -1.0..0.9f64, width in 0.0..1.0f64,
        sigma in 0.0..5.0f64, z1 in -6.0..6.0f64, z2 in -6.0..6.0f64,
    ) {
        let cfg = config(i_low, width, sigma);
        let start = reflect_and_clamp(a, b, &cfg);
        let next = step(start, &cfg, [z1, z2]);
        prop_assert!((0.0..=1.0).contains(&next.alpha) && (0.0..=1.0).contains(&next.beta));
        let h = next.herding();
        prop_assert!(h >= cfg.i_low - 1e-9 && h <= cfg.i_up + 1e-9, "herding {} outside [{}, {}]", h, cfg.i_low, cfg.i_up);
    }

    #[test]
    fn population_quantities_are_in_range(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let state = PopulationState::new(a, b).unwrap();
        if let Ok(g) = mean_field_gamma(state) {
            prop_assert!(g.value() > 0.0 && g.value() < 1.0);
        }
        if let Ok(e) = mutual_information(state) {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
        }
        if let Ok(chi) = social_responsivity(state) {
            prop_assert!(chi >= -0.5 - 1e-12);
        }
    }

    #[test]
    fn mean_field_ratio_is_a_fixed_point(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let state = PopulationState::new(a, b).unwrap();
        prop_assume!(1.0 + a - b > 1e-6);
        let g = state.steady_state().unwrap();
        prop_assert!(((1.0 - g) - (g * a + (1.0 - g) * b)).abs() < 1e-12);
        let clamped = mean_field_gamma(state).unwrap().value();
        prop_assert!((clamped - g).abs() <= 1e-9);
    }

    #[test]
    fn relabelling_bulls_and_bears_keeps_mutual_information(a in 0.0..=1.0f64, b in 0.0..=1.0f64, g in 0.001..0.999f64) {
        let table = interaction_table(PopulationState::new(a, b).unwrap(), BullRatio::clamped(g).unwrap());
        let mirror = interaction_table(PopulationState::new(1.0 - b, 1.0 - a).unwrap(), BullRatio::clamped(1.0 - g).unwrap());
        let (e, m) = (mutual_information_of_table(&table), mutual_information_of_table(&mirror));
        prop_assert!((e - m).abs() < 1e-12, "{} vs {}", e, m);
    }

    #[test]
    fn responsivity_grows_with_herding(x in -0.999..0.998f64, dx in 1e-4..1e-3f64) {
        let (lo, hi) = (responsivity_of_herding(x).unwrap(), responsivity_of_herding(x + dx).unwrap());
        prop_assert!(hi > lo);
        prop_assert_eq!(lo.signum(), if x == 0.0 { lo.signum() } else { x.signum() });
    }

    #[test]
    fn market_function_is_antisymmetric(g in 1e-6..(1.0 - 1e-6), b in 0.01..3.0f64) {
        let sum = market_function(g, b).unwrap() + market_function(1.0 - g, b).unwrap();
        prop_assert!(sum.abs() < 1e-12 * (1.0 + market_function(g, b).unwrap().abs()));
    }

    #[test]
    fn prices_stay_positive(s in 1e-12..10.0f64, b in 0.01..3.0f64, g0 in 0.0..1.0f64, g1 in 0.0..1.0f64) {
        let step = price_update(
            PriceState { s, b_par: b },
            BullRatio::clamped(g0).unwrap(),
            BullRatio::clamped(g1).unwrap(),
        );
        prop_assert!(step.price.s > 0.0);
    }

    #[test]
    fn call_prices_rise_with_volatility(sigma in 0.01..3.0f64, t in 0.01..3.0f64, k in 0.3..2.0f64) {
        let p = |v: f64| call_price_closed(&BsInputs { spot: 1.0, strike: k, mu: 0.0, sigma: v, maturity: t });
        prop_assert!(p(sigma * 1.01) >= p(sigma));
    }

    #[test]
    fn call_prices_are_monotone_and_convex_in_strike(sigma in 0.01..3.0f64, t in 0.01..3.0f64, k in 0.3..2.0f64) {
        let p = |k: f64| call_price_closed(&BsInputs { spot: 1.0, strike: k, mu: 0.0, sigma, maturity: t });
        let h = 0.01;
        prop_assert!(p(k + h) <= p(k) + 1e-15);
        prop_assert!(p(k - h) + p(k + h) - 2.0 * p(k) >= -1e-12);
    }

    #[test]
    fn implied_vol_round_trip(sigma in 0.02..4.0f64, t in 0.05..2.0f64, k in 0.7..1.3f64) {
        let x = BsInputs { spot: 1.0, strike: k, mu: 0.0, sigma, maturity: t };
        let price = call_price_closed(&x);
        // prices pinned to intrinsic value or to zero carry no volatility information
        prop_assume!(price - (1.0 - k).max(0.0) > 1e-6);
        let iv = implied_vol(price, &x, 1e-12, PriceConvention::Undiscounted).unwrap();
        prop_assert!((iv - sigma).abs() < 1e-5, "{} vs {}", iv, sigma);
    }

    #[test]
    fn classifier_reads_slope_signs(base in 0.1..1.0f64, slope in 0.001..0.1f64) {
        let down: Vec<f64> = (0..9).map(|i| base + slope * (8 - i) as f64).collect();
        let up: Vec<f64> = down.iter().rev().copied().collect();
        let smile: Vec<f64> = (0..9).map(|i| base + slope * ((i as f64) - 4.0).powi(2)).collect();
        prop_assert_eq!(classify_slice(&down), SmileShape::Skew);
        prop_assert_eq!(classify_slice(&up), SmileShape::InvertedSkew);
        prop_assert_eq!(classify_slice(&smile), SmileShape::Smile);
    }
}
