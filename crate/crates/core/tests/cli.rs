use pq_elliptic::cli::{run_command_with, EXIT_FAILED, EXIT_OK, EXIT_USAGE, PROFILE_HEADER};
use pq_elliptic::report::{report_from_json, REPORT_CSV_HEADER};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pq-elliptic").chain(args.iter().copied());
    let code = run_command_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

const BASE: [&str; 6] = ["--p", "2", "--q", "6", "--epsilon", "0.002"];

fn with_base(cmd: &str, extra: &[&str]) -> Vec<String> {
    std::iter::once(cmd)
        .chain(BASE)
        .chain(extra.iter().copied())
        .map(String::from)
        .collect()
}

fn run_owned(args: Vec<String>) -> (i32, String, String) {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

#[test]
fn verify_passes_and_writes_csv() {
    let (code, out, err) = run_owned(with_base("verify", &[]));
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out.lines().next().unwrap(), REPORT_CSV_HEADER.join(","));
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true")));
    assert!(err.contains("note:"));
}

#[test]
fn oversized_epsilon_is_a_usage_error() {
    let (code, _, err) = run(&["verify", "--p", "2", "--q", "6", "--epsilon", "0.01"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("epsilon"));
    assert_eq!(run(&["verify", "--p", "0.5", "--q", "6"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(
        run_owned(with_base("verify", &["--t-min", "10", "--t-max", "1"])).0,
        EXIT_USAGE
    );
}

#[test]
fn profile_header_and_rows() {
    let (code, out, _) = run_owned(with_base("profile", &[]));
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), PROFILE_HEADER.join(","));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 400);
    assert!(rows.iter().all(|r| r.len() == 8 && r[7] >= 1.0));
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
}

#[test]
fn json_report_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let (code, _, _) = run_owned(with_base("verify", &["--format", "json", "--out", p]));
    assert_eq!(code, EXIT_OK);
    let sections = report_from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let names: Vec<&str> = sections.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "lemmas",
            "theorem_g",
            "fd_crosscheck",
            "uniform_ellipticity"
        ]
    );
    assert!(sections.iter().all(|s| s.all_passed));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"p": 2, "q": 6, "epsilon": 0.01, "points": 50}"#).unwrap();
    let cfg = path.to_str().unwrap();
    assert_eq!(run(&["verify", "--config", cfg]).0, EXIT_USAGE);
    let (code, out, _) = run(&["profile", "--config", cfg, "--epsilon", "0.002"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().count() > 50);
    assert_eq!(
        run(&["verify", "--config", "/nonexistent/run.json"]).0,
        EXIT_USAGE
    );

    let target = dir.path().join("profile.csv");
    let body = serde_json::json!({"p": 2, "q": 6, "epsilon": 0.002, "t_min": 0.5, "out": target});
    std::fs::write(&path, body.to_string()).unwrap();
    let (code, out, _) = run(&["profile", "--config", cfg]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let first = std::fs::read_to_string(&target)
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .to_string();
    assert!(first.starts_with("5.0000000000000000e-1,"));
}

#[test]
fn phase_and_fit_commands() {
    let (code, out, _) = run_owned(with_base("phase", &["--cycles", "2"]));
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 1 + 5);
    let (code, out, _) = run_owned(with_base("fit", &[]));
    assert_eq!(code, EXIT_OK);
    let fit: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(fit["verified"], true);
}

#[test]
fn minimize_reports_non_convergence() {
    let (code, out, _) = run_owned(with_base(
        "minimize",
        &[
            "--n-cells",
            "9",
            "--boundary",
            "affine:1,0",
            "--tol",
            "1e-8",
        ],
    ));
    assert_eq!(code, EXIT_OK);
    let summary: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(summary["converged"], true);
    let (code, _, _) = run_owned(with_base(
        "minimize",
        &["--n-cells", "9", "--boundary", "saddle", "--max-iter", "2"],
    ));
    assert_eq!(code, EXIT_FAILED);
}
