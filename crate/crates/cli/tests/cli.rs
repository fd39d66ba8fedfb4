use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_daha-opuc"));
    c.env_remove("DAHA_OPUC_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn daha-opuc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn suite_is_deterministic_for_a_seed() {
    let args = ["suite", "--preset", "generic", "--seed", "11", "--draws", "10", "--aw-draws", "2", "--n", "32"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn free_suite_passes() {
    let o = run(&["suite", "--preset", "free", "--draws", "10", "--aw-draws", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["command"], "suite");
}

#[test]
fn json_envelope_carries_schema_and_params() {
    let o = run(&["daha", "verify", "--check", "involution", "--n", "32"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["n"], 32);
    assert_eq!(v["params"]["mode"], "infinite");
    assert!(v["params"]["beta"].is_array());
}

#[test]
fn small_window_is_a_domain_error() {
    let o = run(&["daha", "verify", "--check", "product", "--n", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("WindowError"));
}

#[test]
fn forbidden_truncation_is_rejected() {
    let o = run(&["trunc", "solve", "--kind", "forbidden", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ForbiddenConditionError"));
}

#[test]
fn failing_tolerance_exits_one() {
    let o = run(&["algebra", "xy", "--n", "32", "--tol", "spectrum=1e-300"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_tolerance_name_is_an_error() {
    let o = run(&["algebra", "xy", "--tol", "nonsense=1e-3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_has_comment_and_header() {
    let o = run(&["daha", "coeffs", "--n", "6", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# daha-opuc "));
    assert!(comment.contains("schema=1") && comment.contains("command=daha coeffs") && comment.contains("q=0.7"));
    assert_eq!(lines.next().unwrap(), "n,a_n,r_n,alpha_n,rho_n,z_n");
    assert_eq!(lines.count(), 6);
}

#[test]
fn truncated_spectrum_table() {
    let o = run(&["trunc", "spectrum", "--kind", "b1b4", "--m", "2", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().nth(1).unwrap(), "s,theta_s,rho_s");
    // 2N + 2 eigenvalues for the b1b4 condition of order N
    assert_eq!(s.lines().count(), 2 + 6);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("DAHA_OPUC_OUT", dir.path())
        .args(["interval", "nodes", "--n", "5", "--format", "csv"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("interval-nodes.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "k,x_k,w_k");
}

#[test]
fn explicit_out_wins_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sub").join("y.json");
    let o = bin()
        .env("DAHA_OPUC_OUT", dir.path())
        .args(["aw", "spectrum", "--n", "4", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["y"].as_array().unwrap().len(), 5);
    assert!(!dir.path().join("aw-spectrum.json").exists());
}

#[test]
fn params_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, r#"{"beta": [0.7, 0.4, -0.3, -0.5], "q": 0.8, "mode": "infinite"}"#).unwrap();
    let o = bin().args(["daha", "coeffs", "--n", "4", "--q", "0.75", "--params"]).arg(&path).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["params"]["q"], 0.75);
    assert_eq!(v["params"]["beta"][0], 0.7);
}

#[test]
fn free_coefficients_plot_is_a_column_of_zeros() {
    let o = run(&["plot", "--what", "coefficients", "--mode", "free-boundary", "--n", "10", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines().skip(1);
    assert_eq!(lines.next().unwrap(), "n,a_n,alpha_n");
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(&f[1..], ["0.0", "0.0"]);
    }
}

#[test]
fn s1_nodes_lie_in_symmetric_intervals() {
    let o = run(&["plot", "--what", "nodes", "--n", "12", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let xs: Vec<f64> = s.lines().skip(2).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(xs.len(), 12);
    for (a, b) in xs.iter().zip(xs.iter().rev()) {
        assert!((a + b).abs() < 1e-12);
    }
    assert!(xs.iter().all(|x| x.abs() < 1.0));
}
