//! Statistical checks of the Monte Carlo pricer.

use herdprice_core::bs::{call_price_closed, BsInputs};
use herdprice_core::calibration::preset;
use herdprice_core::math::norm_cdf;
use herdprice_core::mc::{price_distribution, PathEngine, SerialEngine, SimulationSpec};
use herdprice_core::params::ModelParams;

const MONTH: f64 = 1.0 / 12.0;

fn strip_spec(paths: usize, seed: u64) -> SimulationSpec {
    let model = preset("bs-strip").unwrap().params;
    SimulationSpec {
        maturities: vec![MONTH],
        strikes: vec![0.0, 0.9, 0.95, 1.0, 1.05, 1.1],
        n_paths: paths,
        ..SimulationSpec::new(model, seed)
    }
}

#[test]
fn zero_strike_prices_the_mean_price() {
    // symmetric, neutral communities carry no drift
    for (name, model) in [("bs-strip", preset("bs-strip").unwrap().params), ("default", ModelParams::default())] {
        let spec = SimulationSpec { strikes: vec![0.0], n_paths: 20_000, ..SimulationSpec::new(model, 11) };
        let grid = SerialEngine.run_paths(&spec).unwrap();
        for (m, row) in grid.mean_price.iter().enumerate() {
            let (mean, se) = (row[0], grid.std_err[m][0]);
            assert!((mean - 1.0).abs() < 3.0 * se, "{name} t = {}: E[S] = {mean} +- {se}", grid.maturities[m]);
        }
    }
}

#[test]
fn zero_strike_equals_the_sample_mean() {
    let model = preset("spx-2001-full").unwrap().params;
    let spec =
        SimulationSpec { strikes: vec![0.0], n_paths: 5_000, diagnostics: true, ..SimulationSpec::new(model, 2) };
    let run = SerialEngine.run(&spec).unwrap();
    let terminal = run.diagnostics.unwrap().terminal;
    for (m, prices) in terminal.iter().enumerate() {
        let mean = prices.iter().sum::<f64>() / prices.len() as f64;
        assert!((run.grid.mean_price[m][0] - mean).abs() < 1e-12);
    }
}

#[test]
fn narrow_strip_prices_like_black_scholes() {
    let spec = SimulationSpec { diagnostics: true, ..strip_spec(40_000, 5) };
    let run = SerialEngine.run(&spec).unwrap();
    let sigma = run.diagnostics.unwrap().sigma_eff;
    let grid = run.grid;
    for (k, &strike) in grid.strikes.iter().enumerate().skip(1) {
        let bs = call_price_closed(&BsInputs { spot: 1.0, strike, mu: 0.0, sigma, maturity: grid.horizons[0] });
        let (mc, se) = (grid.mean_price[0][k], grid.std_err[0][k]);
        assert!((mc - bs).abs() < 3.0 * se, "K = {strike}: mc {mc} +- {se}, bs {bs} at sigma {sigma}");
    }
}

#[test]
fn narrow_strip_histogram_is_lognormal() {
    let spec = strip_spec(40_000, 6);
    let n = spec.n_paths as f64;
    let run = SerialEngine.run(&SimulationSpec { diagnostics: true, ..spec.clone() }).unwrap();
    let m = run.diagnostics.unwrap().log_price_moments(0).unwrap();
    let hist = price_distribution(&SerialEngine, &spec, MONTH, 30).unwrap();
    let cdf = |s: f64| norm_cdf((s.ln() - m.mean) / m.std_dev);
    let mut chi2 = 0.0;
    let mut bins = 0;
    for (i, p) in hist.probs.iter().enumerate() {
        let expected = n * (cdf(hist.edges[i + 1]) - cdf(hist.edges[i]));
        if expected < 5.0 {
            continue;
        }
        chi2 += (n * p - expected).powi(2) / expected;
        bins += 1;
    }
    assert!(bins >= 20, "only {bins} usable bins");
    // two fitted parameters; 95% point by the Wilson-Hilferty approximation
    let df = (bins - 3) as f64;
    let c = 2.0 / (9.0 * df);
    let critical = df * (1.0 - c + 1.6449 * c.sqrt()).powi(3);
    assert!(chi2 < critical, "chi-square {chi2} over {bins} bins, critical {critical}");
}

#[test]
fn wide_strip_has_fat_tails() {
    let model = ModelParams { i_low: -0.5, i_up: 0.5, ..preset("bs-strip").unwrap().params };
    let spec = SimulationSpec {
        maturities: vec![MONTH, 0.5],
        n_paths: 20_000,
        diagnostics: true,
        ..SimulationSpec::new(model, 9)
    };
    let run = SerialEngine.run(&spec).unwrap();
    let m = run.diagnostics.unwrap().log_price_moments(1).unwrap();
    assert!(m.excess_kurtosis > 0.0, "{m:?}");
}

#[test]
fn prices_fall_and_bend_up_with_strike() {
    let model = preset("spx-2001-full").unwrap().params;
    let spec = SimulationSpec { n_paths: 20_000, ..SimulationSpec::new(model, 3) };
    let grid = SerialEngine.run_paths(&spec).unwrap();
    for (m, row) in grid.mean_price.iter().enumerate() {
        let se = &grid.std_err[m];
        for k in 1..row.len() {
            assert!(row[k] <= row[k - 1] + 2.0 * se[k].max(se[k - 1]), "t index {m}: {row:?}");
        }
        for k in 1..row.len() - 1 {
            let second = row[k - 1] + row[k + 1] - 2.0 * row[k];
            assert!(second >= -2.0 * 2.0 * se[k], "t index {m}: {row:?}");
        }
    }
}
