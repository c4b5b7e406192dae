use std::process::Command;

fn classchan(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_classchan"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(stdout: &str) -> serde_json::Value {
    serde_json::from_str(stdout).unwrap()
}

#[test]
fn simulate_is_byte_identical_for_a_seed() {
    let args = ["simulate", "--p", "0.1", "--seed", "11", "--trials", "50000", "--with-trace"];
    let (code, first, _) = classchan(&args);
    let (_, second, _) = classchan(&args);
    assert_eq!(first, second);
    let doc = json(&first);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["code"]["name"], "rep:9");
    assert_eq!(code, if doc["feasible"] == true { 0 } else { 1 });

    let (_, other, _) = classchan(&["simulate", "--p", "0.1", "--seed", "12", "--trials", "50000", "--with-trace"]);
    assert_ne!(first, other);
}

#[test]
fn evolve_trace_csv_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("trace.csv");
    let csv_arg = csv_path.to_str().unwrap();
    let args = ["evolve", "--p", "0.3", "--code", "rep:9", "--seed", "9", "--trials", "100000", "--trace-out", csv_arg];
    let (code, stdout, stderr) = classchan(&args);
    assert_eq!(code, 0, "{stderr}");
    let (_, again, _) = classchan(&args);
    assert_eq!(stdout, again);

    let doc = json(&stdout);
    assert_eq!(doc["terminal_status"], "converged");
    let rounds = doc["rounds"].as_array().unwrap();
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("round,p_t,criterion_pass,measured_error,stderr,trials"));
    assert_eq!(lines.count(), rounds.len());
}

#[test]
fn scenario_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.conf");
    std::fs::write(&path, "# operating point\nbase_error = 0.2\nseed = 4\ntrials = 20000\ncode = rep:5\n").unwrap();
    let (_, stdout, stderr) = classchan(&["simulate", "--config", path.to_str().unwrap(), "--p", "0.05"]);
    assert!(stderr.is_empty(), "{stderr}");
    let doc = json(&stdout);
    assert_eq!(doc["effective_error"], 0.05);
    assert_eq!(doc["code"]["name"], "rep:5");
    assert_eq!(doc["empirical"]["trials"], 20000);
}

#[test]
fn malformed_inputs_name_file_and_line() {
    let (code, _, stderr) = classchan(&["audit", "--confusion", "tests/data/confusion_bad.csv"]);
    assert_eq!(code, 2);
    assert!(stderr.starts_with("error: tests/data/confusion_bad.csv:2:"), "{stderr}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.conf");
    std::fs::write(&path, "seed = 1\nbase_error = often\n").unwrap();
    let (code, _, stderr) = classchan(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains(":2:"), "{stderr}");
}

#[test]
fn code_design_reports_why_half_crossover_is_infeasible() {
    let (code, stdout, _) = classchan(&["code-design", "--p", "0.5", "--target", "1e-3"]);
    assert_eq!(code, 1);
    let doc = json(&stdout);
    assert_eq!(doc["feasible"], false);
    assert!(doc["code"].is_null());
    assert!(doc["reason"].as_str().unwrap().contains("zero capacity"));
}

#[test]
fn rademacher_exact_and_mc_reports() {
    let (code, stdout, _) = classchan(&["rademacher", "--hypotheses", "tests/data/hypotheses.csv"]);
    assert_eq!(code, 0);
    let exact = json(&stdout);
    assert_eq!(exact["method"], "exact");

    let args = ["rademacher", "--hypotheses", "tests/data/hypotheses.csv", "--method", "mc", "--seed", "8", "--trials", "20000"];
    let (_, first, _) = classchan(&args);
    let (_, second, _) = classchan(&args);
    assert_eq!(first, second);
    let mc = json(&first);
    let diff = (mc["value"].as_f64().unwrap() - exact["value"].as_f64().unwrap()).abs();
    assert!(diff <= 4.0 * mc["std_error"].as_f64().unwrap());
}

#[test]
fn criterion_reports_both_theorems() {
    let (code, stdout, _) = classchan(&["criterion", "--rate", "0.4", "--phi", "0.4", "--min-hy", "0.3"]);
    assert_eq!(code, 0);
    let doc = json(&stdout);
    assert_eq!(doc["theorem2_verdict"], "pass");
    assert!((doc["capacity_bits"].as_f64().unwrap() - 0.7).abs() < 1e-12);
    assert!(doc["theorem1"].is_object());

    let (code, stdout, _) = classchan(&["criterion", "--complexity", "1", "--min-hy", "0.3"]);
    assert_eq!(code, 1);
    assert_eq!(json(&stdout)["phi_of_rf"], 0.0);
}
