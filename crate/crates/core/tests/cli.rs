use std::path::Path;
use std::process::{Command, Output};

use photon_recycler::analytic::AnalyticReport;
use photon_recycler::io;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_photon-recycler"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_records_the_closed_form_delay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = run(&[
        "simulate",
        "--pulse",
        "exp",
        "--kappa1-max",
        "2",
        "--kappa2-max",
        "2",
        "--kappa-i",
        "0",
        "--output",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = io::read_trajectory_csv(std::fs::File::open(&out).unwrap()).unwrap();
    let requested: f64 = table.metadata.get("delay_requested").unwrap().parse().unwrap();
    assert!((requested - (32.0f64 / 11.0).ln()).abs() < 1e-12);
    assert_eq!(table.metadata.get("delay_source"), Some("closed_form"));
    let a_sq = table.column("a_sq").unwrap();
    assert!(1.0 - a_sq[a_sq.len() - 1] < 1e-5);
    assert!(io::sidecar_log_path(&out).exists());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# units:"));
    assert!(!text.contains("unix_time"));
}

#[test]
fn report_contains_the_asymptotic_efficiency() {
    let o = run(&["report", "--pulse", "exp", "--kappa1-max", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: AnalyticReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r.eff_infinity.unwrap() - 0.888889).abs() < 1e-6);
    assert!((r.eff_infinity.unwrap() - 8.0 / 9.0).abs() < 1e-9);
}

#[test]
fn validate_passes_on_a_clean_checkout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("validate.json");
    let o = run(&["validate", "--output", path_str(&out)]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{table}");
    assert!(table.contains("checks passed, max deviation"));
    assert!(!table.contains("FAIL"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(json["checks"].as_array().unwrap().len() >= 20);
}

#[test]
fn unknown_config_key_is_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"pulse\": {\"kind\": \"exp_decay\", \"gamma\": 1.0},\n  \"simm\": {}\n}\n")
        .unwrap();
    let o = run(&["simulate", "--config", path_str(&cfg)]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("simm") && err.contains("line 3"), "{err}");
}

#[test]
fn infeasible_parameters_are_reported() {
    let o = run(&["simulate", "--pulse", "exp", "--kappa1-max", "1.2", "--kappa2-max", "1.2"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no perfect-capture delay exists"), "{}", stderr(&o));
}

#[test]
fn missing_required_values_are_reported() {
    let o = run(&["simulate", "--pulse", "square"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("kappa1_max"));
    let o = run(&["report", "--kappa1-max", "2", "--format", "csv"]);
    assert!(!o.status.success());
    let o = run(&["simulate", "--kappa1-max", "-1"]);
    assert!(!o.status.success());
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "simulate",
            "pulse": {"kind": "square", "b_max": 2.0},
            "policy1": {"kind": "greedy", "kappa_max": 1.5},
            "policy2": {"kind": "greedy", "kappa_max": 1.5},
            "sim": {"dt": 1e-3, "kappa_i": 0.001}}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = run(&["simulate", "--config", path_str(&cfg), "--output", path_str(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let table = io::read_trajectory_csv(outputs[0].as_slice()).unwrap();
    assert_eq!(table.metadata.get("rate_unit"), Some("4"));
    assert_eq!(table.metadata.get("delay_source"), Some("grid_scan_reflectionless"));

    let mut sweeps = Vec::new();
    for (name, threads) in [("s1.csv", "1"), ("s2.csv", "3")] {
        let out = dir.path().join(name);
        let o = bin()
            .env("PHOTON_RECYCLER_THREADS", threads)
            .args(["sweep", "--pulse", "square", "--points", "4", "--axis-min", "0.5", "--axis-max", "4"])
            .args(["--output", path_str(&out)])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        sweeps.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(sweeps[0], sweeps[1]);
    let grid = io::read_heatmap_csv(sweeps[0].as_slice()).unwrap();
    assert_eq!(grid.kappa1_axis.len(), 4);
    assert!(grid.consistent());
}

#[test]
fn report_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "report",
        "--pulse",
        "exp",
        "--kappa1-max",
        "3",
        "--kappa2-max",
        "3",
        "--kappa-i",
        "0.001",
        "--tau-max",
        "2",
        "--output",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let r: AnalyticReport = serde_json::from_str(&text).unwrap();
    let expected = photon_recycler::analytic::report(
        photon_recycler::pulse::PulseKind::ExpDecay,
        3.0,
        3.0,
        0.001,
        Some(2.0),
    )
    .unwrap();
    assert_eq!(r, expected);
    assert!((r.t_stop_two.unwrap() - 6.914669948931068).abs() < 1e-12);
    let again = serde_json::to_string_pretty(&r).unwrap();
    assert_eq!(format!("{again}\n"), text);
}

#[test]
fn help_lists_the_subcommands() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["simulate", "sweep", "report", "validate"] {
        assert!(text.contains(sub), "{sub}");
    }
}
