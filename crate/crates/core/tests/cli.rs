//! End-to-end runs of the binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn twista(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twista"))
        .current_dir(dir)
        .env("TWISTA_THREADS", "1")
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

#[test]
fn group_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(&twista(d, &["group", "build", "--kind", "cyclic", "--n", "6", "-o", "z6.json"])), 0);
    assert_eq!(code(&twista(d, &["group", "validate", "--in", "z6.json"])), 0);
    assert_eq!(json(d, "z6.json")["order"], 6);

    write(d, "corrupted.json", r#"{"order": 3, "mul": [[0,1,2],[1,1,0],[2,0,1]]}"#);
    let o = twista(d, &["group", "validate", "--in", "corrupted.json"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("violations"));

    assert_eq!(code(&twista(d, &["group", "build", "--kind", "symmetric", "--n", "7"])), 4);
    assert_eq!(code(&twista(d, &["group", "validate", "--in", "missing.json"])), 3);
    assert_eq!(code(&twista(d, &["group", "build", "--kind", "cyclic", "--n", "2", "-o", "no/such/dir.json"])), 3);
}

#[test]
fn cocycle_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(&twista(d, &["group", "build", "--kind", "product", "--factors", "3,3", "-o", "z3xz3.json"])), 0);
    let o = twista(d, &["cocycle", "bilinear", "--group", "z3xz3.json", "--A", "0,1,0,0", "--m", "3", "-o", "sig.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&twista(d, &["cocycle", "validate", "--in", "sig.json"])), 0);

    let o = twista(d, &["cocycle", "compare", "--a", "sig.json", "--b", "trivial"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "not similar");

    assert_eq!(code(&twista(d, &["cocycle", "normalize", "--in", "sig.json", "-o", "n.json", "--witness", "w.json"])), 0);
    let n = json(d, "n.json");
    let m = n["m"].as_u64().unwrap();
    let e = &n["exponents"];
    let g = json(d, "z3xz3.json");
    for s in 0..9 {
        // sigma(s, s^-1) = 1
        let inv = (0..9).find(|&t| g["mul"][s][t] == 0).unwrap();
        assert_eq!(e[s][inv].as_u64().unwrap() % m, 0);
    }
    let o = twista(d, &["cocycle", "compare", "--a", "n.json", "--b", "sig.json"]);
    assert!(stdout(&o).starts_with("similar via ξ="));

    write(d, "bad.json", r#"{"group": "z3xz3.json", "m": 3, "exponents": [[0,0,0,0,0,0,0,0,1],[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0,0]]}"#);
    assert_eq!(code(&twista(d, &["cocycle", "validate", "--in", "bad.json"])), 2);
    let o = twista(d, &["cocycle", "bilinear", "--group", "z3xz3.json", "--A", "0,1,0,0", "--m", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn norm_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(&twista(d, &["group", "build", "--kind", "cyclic", "--n", "4", "-o", "z4.json"])), 0);
    write(d, "delta_e.json", r#"{"group": "z4.json", "values": [[1,0],[0,0],[0,0],[0,0]]}"#);
    write(d, "ones.json", r#"{"group": "z4.json", "values": [[1,0],[1,0],[1,0],[1,0]]}"#);

    assert_eq!(code(&twista(d, &["norm", "fourier", "--phi", "delta_e.json", "--sigma", "trivial", "-o", "f.json"])), 0);
    let f = json(d, "f.json");
    assert!((f["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(f["label"], "A=B (finite group)");

    let args = ["norm", "multiplier", "--phi", "ones.json", "--sigma1", "trivial", "--sigma2", "trivial", "-o", "m.json"];
    assert_eq!(code(&twista(d, &args)), 0);
    let m = json(d, "m.json");
    assert!((m["value"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert!(m["gap"].as_f64().unwrap() <= 1e-6);
    assert!(m["wall_time_ms"].as_f64().is_some());
    // repeated runs give identical certificates
    assert_eq!(code(&twista(d, &["norm", "multiplier", "--phi", "ones.json", "-o", "m2.json"])), 0);
    assert_eq!(json(d, "m2.json")["value"], m["value"]);
    assert_eq!(json(d, "m2.json")["xi"], m["xi"]);

    assert_eq!(code(&twista(d, &["norm", "littlewood", "--phi", "delta_e.json", "--group", "z4.json", "-o", "l.json"])), 0);
    assert!((json(d, "l.json")["value"].as_f64().unwrap() - 1.0).abs() <= 1e-6);

    assert_eq!(code(&twista(d, &["norm", "multiplier", "--phi", "ones.json", "--tol", "0"])), 2);
    assert_eq!(code(&twista(d, &["group", "build", "--kind", "cyclic", "--n", "5", "-o", "z5.json"])), 0);
    assert_eq!(code(&twista(d, &["norm", "fourier", "--phi", "ones.json", "--group", "z5.json"])), 2);
}

#[test]
fn oversized_multiplier_exits_unsupported() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(&twista(d, &["group", "build", "--kind", "symmetric", "--n", "5", "-o", "s5.json"])), 0);
    let values = vec!["[1,0]"; 120].join(",");
    write(d, "one.json", &format!(r#"{{"group": "s5.json", "values": [{values}]}}"#));
    assert_eq!(code(&twista(d, &["norm", "fourier", "--phi", "one.json"])), 0);
    assert_eq!(code(&twista(d, &["norm", "multiplier", "--phi", "one.json"])), 4);
}

#[test]
fn amenability_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(&twista(d, &["group", "build", "--kind", "cyclic", "--n", "2", "-o", "z2.json"])), 0);
    let o = twista(d, &["report", "amenability", "--group", "z2.json", "--sigma", "trivial", "--samples", "5", "--seed", "7", "-o", "r.json"]);
    assert_eq!(code(&o), 0);
    let r = json(d, "r.json");
    assert_eq!(r["samples"].as_array().unwrap().len(), 5);
    assert!(r["max_rel_gap"].as_f64().unwrap() < 1e-5);

    let o = twista(d, &["report", "amenability", "--group", "z2.json", "--samples", "5", "--seed", "7", "--format", "csv", "-o", "r.csv"]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(d.join("r.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "sample_id,seed,b_norm,cb_norm,rel_gap,sdp_gap,wall_time_ms");
    assert_eq!(lines.count(), 5);

    let o = twista(d, &["report", "amenability", "--group", "z2.json", "--samples", "0", "-o", "empty.json"]);
    assert_eq!(code(&o), 0);
    assert!(json(d, "empty.json")["samples"].as_array().unwrap().is_empty());

    assert_eq!(code(&twista(d, &["group", "build", "--kind", "product", "--factors", "3,3", "-o", "z3xz3.json"])), 0);
    assert_eq!(code(&twista(d, &["cocycle", "bilinear", "--group", "z3xz3.json", "--A", "0,1,0,0", "--m", "3", "-o", "sig.json"])), 0);
    let o = twista(d, &["report", "amenability", "--sigma", "sig.json", "--samples", "20", "--seed", "1", "-o", "r3.json"]);
    assert_eq!(code(&o), 0);
    assert!(json(d, "r3.json")["max_rel_gap"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn quantum_torus_demo() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = twista(d, &["demo", "quantum-torus", "--q", "3", "--p", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("center dimension 1"));
    assert!(out.contains("algebra ≅ M_3"));

    let o = twista(d, &["demo", "quantum-torus", "--q", "4", "--p", "2", "-o", "t.json"]);
    assert_eq!(code(&o), 0);
    assert!(json(d, "t.json")["center_dimension"].as_u64().unwrap() > 1);
    assert!(!stdout(&o).contains("≅"));

    let o = twista(d, &["demo", "quantum-torus", "--q", "2", "--p", "0"]);
    assert!(stdout(&o).contains("center dimension 4"));
    assert_eq!(code(&twista(d, &["demo", "quantum-torus", "--q", "3", "--p", "3"])), 2);
}

#[test]
fn bad_thread_count_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_twista"))
        .current_dir(tmp.path())
        .env("TWISTA_THREADS", "zero")
        .args(["demo", "quantum-torus", "--q", "2", "--p", "1"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
