use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn herdprice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_herdprice")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = herdprice(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn fixture() -> String {
    format!("{}/fixtures/synthetic_spx_2001.csv", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn simulate_writes_the_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["--out", out, "--seed", "4", "simulate", "--preset", "spx-2001-full", "--paths", "2000"]);
    let v = read_json(&dir.path().join("payoffs.json"));
    for key in ["maturities", "strikes", "mean", "stderr", "n_paths", "seed", "floor_events"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["maturities"].as_array().unwrap().len(), 4);
    assert_eq!(v["strikes"].as_array().unwrap().len(), 9);
    let mean = v["mean"].as_array().unwrap();
    assert_eq!(mean.len(), 4);
    assert!(mean.iter().all(|row| row.as_array().unwrap().len() == 9));
    assert_eq!(v["n_paths"], 2000);
    assert_eq!(v["seed"], 4);
}

#[test]
fn zero_paths_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = herdprice(&["--out", dir.path().to_str().unwrap(), "simulate", "--paths", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("payoffs.json").exists());
}

#[test]
fn bad_inputs_exit_with_code_two() {
    assert_eq!(herdprice(&["simulate", "--preset", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(herdprice(&["simulate", "--set", "i_up=2"]).status.code(), Some(2));
    assert_eq!(herdprice(&["--config", "/nonexistent/config.json", "presets"]).status.code(), Some(2));
    assert_eq!(herdprice(&["calibrate", "--target", "/nonexistent/target.csv"]).status.code(), Some(2));
    assert_eq!(herdprice(&["diagnose", "--alpha", "1.5", "--beta", "0.2"]).status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        ok(&["--out", dir.path().to_str().unwrap(), "--seed", "9", "simulate", "--paths", "3000", "--dump-path"]);
    }
    for name in ["payoffs.json", "community_path.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let path = std::fs::read_to_string(a.path().join("community_path.csv")).unwrap();
    let header = path.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,alpha,beta,gamma");
}

#[test]
fn embedded_config_reproduces_the_run() {
    let first = tempfile::tempdir().unwrap();
    ok(&[
        "--out",
        first.path().to_str().unwrap(),
        "--seed",
        "21",
        "--threads",
        "2",
        "simulate",
        "--preset",
        "vod-2001-1m",
        "--set",
        "b_par=1.2",
        "--paths",
        "2500",
        "--strikes",
        "0.9,1.0,1.1",
    ]);
    let v = read_json(&first.path().join("payoffs.json"));
    let config = first.path().join("echo.json");
    std::fs::write(&config, serde_json::to_string(&v["config"]).unwrap()).unwrap();

    let second = tempfile::tempdir().unwrap();
    ok(&["--config", config.to_str().unwrap(), "--out", second.path().to_str().unwrap(), "simulate"]);
    assert_eq!(
        std::fs::read(first.path().join("payoffs.json")).unwrap(),
        std::fs::read(second.path().join("payoffs.json")).unwrap()
    );
}

#[test]
fn surface_from_saved_payoffs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["--out", out, "simulate", "--preset", "vod-2001-1m", "--paths", "4000"]);
    let payoffs = dir.path().join("payoffs.json");
    ok(&[
        "--out",
        out,
        "surface",
        "--preset",
        "vod-2001-1m",
        "--payoffs",
        payoffs.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    let surface = herdprice::surface_io::read_surface(&dir.path().join("surface.csv")).unwrap();
    assert_eq!(surface.maturities().len(), 1);
    assert!(surface.len() >= 7, "{surface:?}");
    let plot = std::fs::read_to_string(dir.path().join("plot_m1_t0.0833333333.csv")).unwrap();
    assert!(plot.contains("strike_over_spot,sigma_imp,sigma_players,std_err"));
}

#[test]
fn per_maturity_calibration_has_one_block_per_maturity() {
    let dir = tempfile::tempdir().unwrap();
    let target = fixture();
    ok(&[
        "--out",
        dir.path().to_str().unwrap(),
        "calibrate",
        "--target",
        &target,
        "--preset",
        "spx-2001-full",
        "--free",
        "sigma_alpha,b_par",
        "--per-maturity",
        "--starts",
        "1",
        "--paths",
        "1000",
        "--max-iter",
        "4",
    ]);
    let v = read_json(&dir.path().join("calibration.json"));
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 4);
    let maturities: Vec<f64> = blocks.iter().map(|b| b["maturity"].as_f64().unwrap()).collect();
    assert!(maturities.windows(2).all(|w| w[0] < w[1]), "{maturities:?}");
    assert!(dir.path().join("calibration.txt").exists());
}

#[test]
fn reduced_protocol_frees_only_its_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let target = fixture();
    ok(&[
        "--out",
        dir.path().to_str().unwrap(),
        "calibrate",
        "--target",
        &target,
        "--protocol",
        "spx-reduced",
        "--starts",
        "1",
        "--paths",
        "1000",
        "--max-iter",
        "3",
    ]);
    let v = read_json(&dir.path().join("calibration.json"));
    let block = &v["blocks"][0];
    let mut free: Vec<&str> = block["free"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    free.sort_unstable();
    assert_eq!(free, ["delta_market", "i_low", "i_up", "k_asym", "sigma_alpha"]);
    // fixed parameters keep the protocol's values in every run
    for run in block["runs"].as_array().unwrap() {
        let end = &run["end"];
        assert_eq!(end["alpha0"], 0.5);
        assert_eq!(end["beta0"], 0.5);
        assert_eq!(end["b_par"], 1.0);
    }
}

#[test]
fn diagnose_grid_and_point() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["--out", dir.path().to_str().unwrap(), "diagnose", "--grid-step", "0.05"]);
    let text = std::fs::read_to_string(dir.path().join("population_grid.csv")).unwrap();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 441);
    for r in &rows {
        let (a, b) = (&r[0], &r[1]);
        if a == b && !r[5].is_empty() {
            let e: f64 = r[5].parse().unwrap();
            assert!(e.abs() < 1e-12, "{r:?}");
        }
        if a == "0" && b.parse::<f64>().unwrap() == 1.0 {
            assert_eq!(&r[6], "singular");
        }
    }
    assert_eq!(rows.iter().filter(|r| &r[6] == "singular").count(), 1);

    let out = ok(&["diagnose", "--alpha", "0.2", "--beta", "0.7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("herding I            0.500000000"), "{text}");
}

#[test]
fn presets_listing() {
    let out = ok(&["presets", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    for name in ["spx-2001-full", "spx-2001-reduced", "vod-2001-1m", "bs-strip"] {
        assert!(names.contains(&name), "{name} missing from {names:?}");
    }
    let out = ok(&["presets"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("vod-2001-1y-limits"));
}
