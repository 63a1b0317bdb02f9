use std::process::Command;

use fueterlab::cli::run_cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["fueterlab"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn catalog_lists_fields_as_json() {
    let (code, out, _) = run(&["catalog", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let arr = v.as_array().unwrap();
    let entry = |name: &str| arr.iter().find(|e| e["name"] == name).unwrap().clone();
    assert_eq!(entry("fueter:z^2")["satisfies_condition"], true);
    assert_eq!(entry("fueter:z^2")["kind"], "fueter");
    assert_eq!(entry("control:x^3")["satisfies_condition"], false);
    assert_eq!(entry("product:z^2*mercator:exp")["kind"], "product");
    for e in arr {
        assert!(e["singular_loci"].is_string());
    }
}

#[test]
fn control_theorem_is_an_expected_failure() {
    let (code, out, _) = run(&["run", "--field", "control:x3", "--check", "theorem", "--n", "16"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["field"], "control:x^3");
    assert_eq!(reports[0]["pass"], false);
    assert!(reports[0]["rel_max"].as_f64().unwrap() > 1.0);
}

#[test]
fn positive_suite_passes() {
    let (code, out, err) = run(&["run", "--suite", "positive", "--n", "24", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["config"]["suite"], "positive");
    assert_eq!(v["config"]["plan"]["n_samples"], 24);
    assert!(v["reports"].as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(run(&["run", "--check", "nosuch"]).0, 2);
    assert_eq!(run(&["run", "--field", "fueter:nosuch"]).0, 2);
    assert_eq!(run(&["run", "--backend", "fd3"]).0, 2);
    assert_eq!(run(&["run", "--box", "r=0:1"]).0, 2);
    assert_eq!(run(&["run", "--n", "0"]).0, 2);
    assert_eq!(run(&["run", "--bogus"]).0, 2);
    assert_eq!(run(&["converge", "--check", "condition", "--field", "fueter:*"]).0, 2);
    assert_eq!(run(&["converge", "--check", "condition", "--field", "fueter:exp", "--levels", "2"]).0, 2);
}

#[test]
fn unexpected_outcome_exits_1() {
    // Condition fields pass only at their own tolerance; an fd2 step this
    // coarse cannot meet it.
    let (code, _, err) = run(&[
        "run", "--field", "fueter:exp", "--check", "condition", "--backend", "fd2", "--h", "0.2", "--n", "16",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("unexpected: fueter:exp condition"));
}

#[test]
fn out_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let (code, out, _) = run(&[
        "run", "--suite", "negative", "--check", "condition", "--n", "8", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# version="));
    assert!(text.contains("# suite=negative\n"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "check,field,backend,h,n,max_abs,mean_abs,rel_max,worst_t,worst_r,worst_alpha,worst_beta,tol,pass"
    );
    assert_eq!(text.lines().filter(|l| l.starts_with("condition,control:")).count(), 5);
    // Nothing else left in the directory.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# smoke\nsuite = identities\nn = 12\ncheck = frame_identities\n").unwrap();
    let (code, out, _) = run(&["run", "--config", cfg.to_str().unwrap(), "--n", "10"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["config"]["plan"]["n_samples"], 10);
    assert_eq!(v["reports"][0]["check"], "frame_identities");
    assert_eq!(v["reports"][0]["n"], 10);
}

#[test]
fn converge_reports_order() {
    let (code, out, _) = run(&[
        "converge", "--backend", "fd2", "--check", "condition", "--field", "fueter:exp", "--n", "32",
        "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let order = v["convergence"]["order"].as_f64().unwrap();
    assert!((order - 2.0).abs() < 0.3, "{order}");
    assert_eq!(v["convergence"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_fueterlab"))
        .args(["run", "--field", "control:x3", "--check", "theorem", "--n", "8", "--format", "pretty"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("control:x^3"));
    assert!(text.contains("FAIL   fail"));
    let out = Command::new(env!("CARGO_BIN_EXE_fueterlab")).args(["run", "--check", "nosuch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
