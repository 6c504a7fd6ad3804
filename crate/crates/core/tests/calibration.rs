use herdprice_core::calibration::{calibrate, objective, preset, CalibrationSpec, DeltaMode, Objective, PENALTY_BASE};
use herdprice_core::mc::{SerialEngine, SimulationSpec};
use herdprice_core::params::{ModelParams, ParamName};
use herdprice_core::surface::{SurfacePoint, VolSurface};

fn target() -> VolSurface {
    let points = [0.25, 0.5]
        .iter()
        .flat_map(|&t| {
            [0.9, 1.0, 1.1].map(|k| SurfacePoint {
                maturity_years: t,
                strike_over_spot: k,
                implied_vol: 0.9 - 0.3 * (k - 1.0),
            })
        })
        .collect();
    VolSurface::new("toy", "", 1.0, points)
}

fn mc() -> SimulationSpec {
    SimulationSpec { n_paths: 2_000, ..SimulationSpec::new(ModelParams::default(), 8) }
}

#[test]
fn objective_is_deterministic() {
    let p = preset("spx-2001-full").unwrap().params;
    let a = objective(&p, &target(), &mc());
    let b = objective(&p, &target(), &mc());
    assert_eq!(a.to_bits(), b.to_bits());
    let other = objective(&p, &target(), &SimulationSpec { base_seed: 9, ..mc() });
    assert_ne!(a.to_bits(), other.to_bits());
}

#[test]
fn infeasible_vectors_lose_to_every_feasible_one() {
    let obj = Objective::new(&target(), &mc(), DeltaMode::Computed).unwrap();
    let feasible: Vec<f64> = ["spx-2001-full", "vod-2001-1m", "bs-strip", "spx-2005-1m"]
        .iter()
        .map(|n| obj.evaluate(&SerialEngine, &preset(n).unwrap().params).loss)
        .collect();
    let worst_feasible = feasible.iter().copied().fold(0.0, f64::max);
    let base = preset("spx-2001-full").unwrap().params;
    for (name, value) in [
        (ParamName::SigmaAlpha, -0.1),
        (ParamName::KAsym, 0.0),
        (ParamName::IUp, 1.2),
        (ParamName::ILow, 0.5),
        (ParamName::Alpha0, 1.5),
        (ParamName::BPar, -1.0),
    ] {
        let mut p = base;
        p.set(name, value);
        let bad = obj.evaluate(&SerialEngine, &p);
        assert!(bad.violation > 0.0, "{name}");
        assert!(bad.loss >= PENALTY_BASE && bad.loss >= 10.0 * worst_feasible, "{name}: {}", bad.loss);
    }
}

#[test]
fn best_loss_never_increases_and_runs_repeat() {
    let start = preset("spx-2001-full").unwrap().params;
    let mut spec = CalibrationSpec::new(target(), start, vec![ParamName::SigmaAlpha, ParamName::KAsym], mc());
    spec.n_starts = 2;
    spec.simplex.max_iter = 15;
    let report = calibrate(&spec, 3, &SerialEngine).unwrap();
    for run in &report.blocks[0].runs {
        assert!(run.trace.windows(2).all(|w| w[1] <= w[0]), "{:?}", run.trace);
        assert!(run.loss <= run.trace[0]);
    }
    let again = calibrate(&spec, 3, &SerialEngine).unwrap();
    assert_eq!(report, again);
}
