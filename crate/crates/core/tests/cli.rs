use std::path::Path;
use std::process::{Command, Output};

fn rankone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankone")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_scan_two_atoms_two_couplings() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = rankone(&["spectrum-scan", "--measure", "atoms([[0,0.5],[1,0.5]])", "--alpha", "1", "--alpha", "2", "--csv", path_arg(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha_re,alpha_im,eigenvalue,weight"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    // α = 1: eigenvalues 1 ± 1/√2
    let r = 0.5f64.sqrt();
    assert!((rows[0][2] - (1.0 - r)).abs() < 1e-14 && (rows[1][2] - (1.0 + r)).abs() < 1e-14);
    assert!(json(&out)["passed"].as_bool().unwrap());
}

#[test]
fn empty_alpha_list_exits_nonzero() {
    let out = rankone(&["spectrum-scan", "--measure", "atoms([[0,0.5],[1,0.5]])"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn clark_verify_all_routes_on_three_atoms() {
    let out = rankone(&[
        "clark-verify",
        "--measure",
        "atoms([[-2,0.2],[0.1,0.5],[1.9,0.3]])",
        "--gamma",
        "0.3",
        "--route",
        "all",
        "--alpha=-1",
        "--grid",
        "1024",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    let rep = &v["result"]["representations"][0];
    for key in ["unitarity_residual", "intertwining_residual", "normalization_residual", "dim", "alpha"] {
        assert!(!rep[key].is_null(), "missing {key}");
    }
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "snf_vs_dbr"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = vec![];
    for k in 0..2 {
        let out_path = dir.path().join(format!("r{k}.json"));
        let csv_path = dir.path().join(format!("r{k}.csv"));
        let out = rankone(&["regularize", "--alpha", "2", "--seed", "11", "--out", path_arg(&out_path), "--csv", path_arg(&csv_path)]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        reports.push((std::fs::read(&out_path).unwrap(), std::fs::read(&csv_path).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
    let a = rankone(&["schur-test", "--pairs", "12", "--seed", "3"]);
    let b = rankone(&["schur-test", "--pairs", "12", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_runs_and_errors_carry_location() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        r#"{"schema_version": 1, "subcommand": "dissipative",
            "measure": {"preset": "atoms", "support": "line", "atoms": [[-1, 0.3], [0.5, 0.5], [2, 0.2]]},
            "alpha": [[0.5, 1.0]], "grid": 256}"#,
    )
    .unwrap();
    let out = rankone(&["run", path_arg(&good)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["gamma", "Q", "P", "route_residuals"] {
        assert!(!v["result"][key].is_null(), "missing {key}");
    }

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"schema_version\": 1,\n  \"subcommand\": \"model-check\",\n  \"gamma\": [0.1,]\n}").unwrap();
    let out = rankone(&["run", path_arg(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let missing = dir.path().join("missing.json");
    let cfg = format!(
        r#"{{"schema_version": 1, "subcommand": "model-check", "measure": {{"preset": "file", "path": "{}"}}}}"#,
        missing.display()
    );
    std::fs::write(&bad, cfg).unwrap();
    let out = rankone(&["run", path_arg(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("measure.path"));
}

#[test]
fn failing_checks_exit_one() {
    // an absurd tolerance turns a passing run into a failing one
    let out = rankone(&["model-check", "--gamma", "0.3,0.2", "--tol", "theta_at_0=1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!json(&out)["passed"].as_bool().unwrap());
}

#[test]
fn dissipative_rejects_real_alpha() {
    let out = rankone(&["dissipative", "--alpha", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
}
