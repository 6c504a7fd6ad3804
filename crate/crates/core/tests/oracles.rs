//! Independent checks of the closed forms against brute force.

use herdprice_core::bs::{call_price_closed, call_price_integral, implied_vol, vega, BsInputs, PriceConvention};
use herdprice_core::population::{
    agent_oracle, interaction_table, mean_field_gamma, mutual_information, mutual_information_neutral,
    mutual_information_of_table, AgentPopulation, BullRatio, PopulationState,
};
use herdprice_core::pricemap::{integrated_price, price_update, PriceState};

#[test]
fn agents_reach_the_mean_field_ratio() {
    // interior points away from the singular corner, where mixing is fast
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut seed = 100;
    for &a in &grid {
        for &b in &grid {
            let state = PopulationState::new(a, b).unwrap();
            let expected = mean_field_gamma(state).unwrap().value();
            let pop = AgentPopulation::new(2_000, state, expected);
            let est = agent_oracle(pop, 400_000, seed).unwrap();
            seed += 1;
            let tol = 4.0 * est.std_err + 1e-3;
            assert!(
                (est.gamma - expected).abs() < tol,
                "({a}, {b}): agents {} +- {}, mean field {expected}",
                est.gamma,
                est.std_err
            );
        }
    }
}

#[test]
fn mutual_information_vanishes_for_independent_players() {
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let Ok(e) = mutual_information(PopulationState::new(p, p).unwrap()) else {
            continue;
        };
        assert!(e.abs() < 1e-12, "alpha = beta = {p}: {e}");
    }
}

#[test]
fn neutral_closed_form_matches_the_table() {
    for i in 1..20 {
        let a = i as f64 / 20.0;
        let state = PopulationState::new(a, 1.0 - a).unwrap();
        let table = interaction_table(state, BullRatio::NEUTRAL);
        let from_table = mutual_information_of_table(&table);
        let closed = mutual_information_neutral(state.herding());
        assert!((from_table - closed).abs() < 1e-10, "alpha = {a}: {from_table} vs {closed}");
    }
    assert!(mutual_information_neutral(0.999) > 0.988);
    assert_eq!(mutual_information_neutral(1.0), 1.0);
}

#[test]
fn integral_pricer_agrees_with_closed_form() {
    for &sigma in &[0.05, 0.2, 0.5, 1.0, 2.0] {
        for &t in &[0.02, 0.25, 0.5, 1.0, 3.0] {
            for &k in &[0.7, 1.0, 1.4] {
                let x = BsInputs { spot: 1.0, strike: k, mu: 0.05, sigma, maturity: t };
                let closed = call_price_closed(&x);
                let integral = call_price_integral(&x, 1e-10).unwrap();
                assert!((closed - integral).abs() < 1e-6, "{x:?}: {closed} vs {integral}");
            }
        }
    }
}

#[test]
fn vega_matches_central_differences() {
    for &sigma in &[0.1, 0.3, 0.8] {
        for &k in &[0.8, 1.0, 1.2] {
            let x = BsInputs { spot: 1.0, strike: k, mu: 0.03, sigma, maturity: 0.5 };
            let h = 1e-5;
            let fd =
                (call_price_closed(&x.with_sigma(sigma + h)) - call_price_closed(&x.with_sigma(sigma - h))) / (2.0 * h);
            let v = vega(&x);
            assert!(((v - fd) / v).abs() < 1e-5, "{x:?}: {v} vs {fd}");
        }
    }
}

#[test]
fn implied_vol_inverts_prices_across_the_grid() {
    for &sigma in &[0.05, 0.4, 1.5, 5.0] {
        for &t in &[1.0 / 12.0, 1.0] {
            for &k in &[0.8, 1.0, 1.2] {
                let x = BsInputs { spot: 1.0, strike: k, mu: 0.0, sigma, maturity: t };
                let price = call_price_closed(&x);
                // a price at intrinsic value carries no volatility information
                if price - (1.0 - k).max(0.0) < 1e-8 {
                    continue;
                }
                let iv = implied_vol(price, &x, 1e-12, PriceConvention::Undiscounted).unwrap();
                assert!((iv - sigma).abs() < 1e-6, "{x:?}: {iv}");
            }
        }
    }
}

#[test]
fn small_updates_track_the_integrated_price() {
    for &b in &[0.5, 1.0, 1.09, 1.5] {
        let (g0, g1) = (0.5, 0.62);
        let mut price = PriceState::new(b);
        let mut prev = BullRatio::clamped(g0).unwrap();
        for i in 1..=1000 {
            let next = BullRatio::clamped(g0 + (g1 - g0) * i as f64 / 1000.0).unwrap();
            price = price_update(price, prev, next).price;
            prev = next;
        }
        let exact = integrated_price(g1, b).unwrap() / integrated_price(g0, b).unwrap();
        assert!((price.s / exact - 1.0).abs() < 0.01, "B = {b}: {} vs {exact}", price.s);
    }
}
