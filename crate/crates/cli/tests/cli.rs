use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use desing::report::{AnalysisReport, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_desing"))
}

fn reference() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fields/reference.vf")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn weights_of_the_reference_system() {
    let o = run(&["weights", reference().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(alpha, beta, k) = (1, 1, 1)\n");
}

#[test]
fn analyze_reports_six_saddles() {
    let o = run(&["analyze", reference().to_str().unwrap(), "--param", "a=1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("divisor equilibria: 6"));
    assert_eq!(out.matches("hyperbolic-saddle").count(), 6);
    for id in ["k2-desing", "k1-jacobian", "hx-radial", "hx-steady-state"] {
        assert!(out.contains(&format!("[{id}]")), "{id} missing");
    }
}

#[test]
fn missing_binding_is_a_domain_error() {
    let o = run(&["analyze", reference().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error [bind]: parameter `a` has no binding"));
}

#[test]
fn negative_binding_and_unknown_parameter() {
    let o = run(&["analyze", reference().to_str().unwrap(), "--param", "a=-1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("must be positive"));
    let o = run(&["analyze", reference().to_str().unwrap(), "--param", "a=1", "--param", "b=2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--param", "a"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--model", "torus"]).status.code(), Some(2));
    let o = run(&["analyze", reference().to_str().unwrap(), "--param", "a=1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.vf");
    std::fs::write(&p, "var x y; dx/dt = x^(-1); dy/dt = y;").unwrap();
    let o = run(&["weights", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error [parse]"));
    let o = run(&["weights", dir.path().join("absent.vf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error [input]"));
}

#[test]
fn reads_stdin() {
    let mut child = bin()
        .args(["weights", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"var x y; dx/dt = x^2; dy/dt = y^3;")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "(alpha, beta, k) = (2, 1, 2)\n");
}

#[test]
fn ambiguous_weights_use_the_preferred_solution() {
    let mut child = bin()
        .args(["weights"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"var x y; dx/dt = x; dy/dt = -y;")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(alpha, beta, k) = (1, 1, 0)\n");
    assert!(stderr(&o).contains("not unique"));
}

#[test]
fn explicit_weights_are_checked() {
    let r = reference();
    let o = run(&["blowup", r.to_str().unwrap(), "--weights", "2,1,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error [weights]"));
    let o = run(&["blowup", r.to_str().unwrap(), "--weights", "2,2,2", "--chart", "K1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn blowup_shows_both_fields() {
    let o = run(&["blowup", reference().to_str().unwrap(), "--chart", "K1"]);
    let out = stdout(&o);
    assert!(out.contains("r1' = a*r1^2 - 2*r1^2*y1"));
    assert!(out.contains("r1' = a*r1 - 2*r1*y1"));
    assert!(out.contains("y1' = -2*a*y1 + 3*y1^2"));
    let o = run(&["blowup", reference().to_str().unwrap(), "--model", "sphere"]);
    assert!(stdout(&o).contains("[sphere] (theta, r)"));
}

#[test]
fn json_report_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    for model in ["directional", "sphere", "hyperbolic-x", "hyperbolic-y"] {
        let o = run(&[
            "analyze",
            reference().to_str().unwrap(),
            "--param",
            "a=3/2",
            "--model",
            model,
            "--format",
            "json",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        let back = AnalysisReport::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
    }
}

#[test]
fn outputs_are_deterministic() {
    let r = reference();
    let args = ["analyze", r.to_str().unwrap(), "--param", "a=0.5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["portrait", r.to_str().unwrap(), "--param", "a=1", "--t-end", "0.5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn portrait_csv_has_fifty_orbits() {
    let o = run(&[
        "portrait",
        reference().to_str().unwrap(),
        "--param",
        "a=1",
        "--chart",
        "K1",
        "--grid",
        "0:1:5,-1:1:5",
        "--t-end",
        "1",
        "--step",
        "0.01",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let mut ids: Vec<usize> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 5);
            assert_eq!(f[0], "K1");
            for v in &f[2..] {
                let x: f64 = v.parse().unwrap();
                assert_eq!(&format!("{x:.16e}"), v);
            }
            f[1].parse().unwrap()
        })
        .collect();
    ids.dedup();
    assert_eq!(ids.len(), 50);
}

#[test]
fn portrait_in_polar_and_original_frames() {
    let r = reference();
    let o = run(&["portrait", r.to_str().unwrap(), "--param", "a=1", "--model", "hyperbolic-x", "--t-end", "0.2", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 50);
    let o = run(&["portrait", r.to_str().unwrap(), "--param", "a=1", "--original", "--grid", "-0.5:0.5:2,-0.5:0.5:3", "--t-end", "0.2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("\"kind\": \"original\""));
}

#[test]
fn verify_honours_the_seed_variable() {
    let o = bin()
        .args(["verify", "--format", "json"])
        .env("DESING_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("\"seed\": 11"));
    let o = bin().args(["verify"]).env("DESING_SEED", "eleven").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
