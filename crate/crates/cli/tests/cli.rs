use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rearrange-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn cp_reports_constant_and_passes() {
    let out = lab(&["cp", "--p", "1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], "rearrange-lab/1");
    let c = r["fits"][0]["value"].as_f64().unwrap();
    assert!((c - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9);
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(lab(&["cp", "--p", "2.5"]).status.code(), Some(2));
    assert_eq!(lab(&["eta", "--tau-grid", "dyadic:x"]).status.code(), Some(2));
    assert_eq!(lab(&["norms", "--space", "lp:0.5", "--grid-log2", "4"]).status.code(), Some(2));
    assert_eq!(lab(&["invariants", "--groups", "nope"]).status.code(), Some(2));
    assert_eq!(lab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn failed_acceptance_exits_with_one() {
    // worst-case budgets cannot be met for eight steps of the delta system
    let out = lab(&["extract", "--grid-log2", "12", "--rule", "worst-case"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["passed"], false);
}

#[test]
fn eta_csv_and_out_file() {
    let dir = std::env::temp_dir().join(format!("rearrange-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eta.csv");
    let out = lab(&[
        "eta", "--family", "rademacher:3", "--grid-log2", "6", "--tau-grid", "dyadic:3",
        "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("curve,x_label,x,y\n"));
    let eta_half: f64 = text
        .lines()
        .find(|l| l.starts_with("eta,tau,0.5,"))
        .and_then(|l| l.rsplit(',').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((eta_half - 1.0).abs() < 1e-9);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reports_are_deterministic_apart_from_wall_clock() {
    let args = ["eta-star", "--kind", "stable", "--n", "2", "--grid-log2", "10", "--restarts", "2", "--tau-grid", "0.01,0.1,0.5"];
    let mut a = json(&lab(&args));
    let mut b = json(&lab(&args));
    a["wall_clock_s"] = 0.into();
    b["wall_clock_s"] = 0.into();
    assert_eq!(a, b);
}

#[test]
fn nested_tail_extraction_is_rejected_by_precondition() {
    let out = lab(&["extract", "--sequence", "nested-tail", "--len", "3", "--grid-log2", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checks"][0]["name"], "precondition_rejected");
}

#[test]
fn norms_of_a_csv_input() {
    let dir = std::env::temp_dir().join(format!("rearrange-norms-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("x.csv");
    std::fs::write(&path, "n_cells=4\n2\n1\n3\n2\n").unwrap();
    let out = lab(&["norms", "--input", path.to_str().unwrap(), "--space", "l1", "--space", "linf"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["fits"][0]["value"].as_f64().unwrap(), 2.0);
    assert_eq!(r["fits"][2]["value"].as_f64().unwrap(), 3.0);
    std::fs::remove_dir_all(&dir).ok();
}
