use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

fn dunkl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_default_suites_pass_classical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"n": 1, "kappa": [0.0]}"#);
    let summary = dir.path().join("s.json");
    let out = dunkl(&["verify", "--config", &cfg, "--summary", summary.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 16);
    for s in suites {
        assert!(s["passed"].as_bool().unwrap());
        assert!(s["max_residual"].as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn negative_multiplicity_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"n": 1, "kappa": [-1.0]}"#);
    let out = dunkl(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn single_suite_selection() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"n": 1, "kappa": [0.25]}"#);
    let out = dunkl(&["verify", "--config", &cfg, "--suite", "mehler"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let json = &text[text.find('{').unwrap()..];
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["suite"], "mehler");

    let out = dunkl(&["verify", "--config", &cfg, "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_classical_slopes_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"n": 1, "kappa": [0.0], "experiment": {"p": 2, "q": 4, "r": [1.2, 1.3333333333333333, 2]}}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = dunkl(&["experiment", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let summary = std::fs::read_to_string(a.join("summary.json")).unwrap();
    assert_eq!(summary, std::fs::read_to_string(b.join("summary.json")).unwrap());
    let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
    let slopes: Vec<f64> = v["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["fitted_slope"].as_f64().unwrap())
        .collect();
    assert!(slopes[0] < 0.0);
    assert!(slopes[1].abs() < 0.04);
    assert!((slopes[2] - 0.25).abs() < 0.15 * 0.25);
    for run in v["runs"].as_array().unwrap() {
        let name = run["csv"].as_str().unwrap();
        let ca = std::fs::read(a.join(name)).unwrap();
        assert_eq!(ca, std::fs::read(b.join(name)).unwrap());
        let text = String::from_utf8(ca).unwrap();
        assert!(text.starts_with("epsilon,sigma,Lp_norm,schatten_r_norm,ratio,log_ratio\n"));
        assert_eq!(text.lines().count(), 8);
        for key in ["r_star", "predicted_slope", "fitted_slope", "stderr", "admissible_flags"] {
            assert!(run.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn experiment_reports_dunkl_threshold() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"n": 1, "kappa": [0.25], "experiment": {"p": 2, "q": 2.6666666666666665, "r": [2], "eps2_grid": [0.9, 0.93, 0.96, 0.98, 0.99]}}"#,
    );
    let out_dir = dir.path().join("o");
    let out = dunkl(&["experiment", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert!((v["r_star"].as_f64().unwrap() - 1.6).abs() < 1e-12);
    assert_eq!(v["admissible_flags"]["on_scaling_line"], true);
}

#[test]
fn experiment_flags_non_sharp_regime() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"n": 1, "kappa": [1.0], "experiment": {"p": 2, "q": 1.3333333333333333, "r": [8], "eps2_grid": [0.9, 0.93, 0.96, 0.98, 0.99]}}"#,
    );
    let out_dir = dir.path().join("o");
    let out = dunkl(&["experiment", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("sharp regime"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["admissible_flags"]["sharp_regime"], false);
}

#[test]
fn experiment_without_output_path_fails_early() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"n": 1, "kappa": [0.0], "experiment": {"p": 2, "q": 4, "r": [2]}}"#,
    );
    let out = dunkl(&["experiment", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = write_config(dir.path(), "d.json", r#"{"n": 1, "kappa": [0.0]}"#);
    let out = dunkl(&["experiment", "--config", &cfg, "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classical_basis_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"n": 1, "kappa": [0.0]}"#);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = dunkl(&["basis", "--config", &cfg, "--max-degree", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.as_bytes(), std::fs::read(&b).unwrap().as_slice());
    // sqrt(nu!) H_nu against 1, 2x, 4x^2 - 2, 8x^3 - 12x
    let classical: &[(u32, u32, f64)] = &[(0, 0, 1.0), (1, 1, 2.0), (2, 2, 4.0), (2, 0, -2.0), (3, 3, 8.0), (3, 1, -12.0)];
    let fact = [1.0f64, 1.0, 2.0, 6.0];
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let hermite: Vec<&Vec<&str>> = rows.iter().filter(|r| r[0] == "hermite").collect();
    assert_eq!(hermite.len(), classical.len());
    for &(nu, mono, c) in classical {
        let row = hermite
            .iter()
            .find(|r| r[1] == nu.to_string() && r[2] == mono.to_string())
            .unwrap();
        let v: f64 = row[3].parse().unwrap();
        assert!((v * fact[nu as usize].sqrt() - c).abs() < 1e-14, "{nu} {mono}");
    }
}

#[test]
fn basis_beyond_cutoff_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"n": 3, "kappa": [0.5, 0.5, 0.5]}"#);
    let out = dunkl(&["basis", "--config", &cfg, "--max-degree", "17", "--out", dir.path().join("b.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
