use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tetradecomp"));
    cmd.env_remove("TETRADECOMP_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let out = run(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn scalar_triple(a: f64, b: f64, p: f64) -> String {
    format!(
        r#"{{"schema":"tetradecomp/1","dim":1,"mode":"triple","operators":[[[[{a},0]]],[[[{b},0]]],[[[{p},0]]]]}}"#
    )
}

fn without_wall_time(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"wall_time_ms\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn planted_pair_decomposes_against_truth() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "pair.json", &["--family", "tensor", "--spec", "A1:2,A2:2", "--seed", "1"]);
    let out = run(&["decompose", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["dim"], 4);
    assert_eq!(r["leaves"]["A1,A2"]["dim"], 4);
    assert!(r["truth_max_deviation"].as_f64().unwrap() <= 1e-8);
    assert!(r["verdicts"].as_object().unwrap().values().all(|v| v == true));
}

#[test]
fn generate_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--family", "sum", "--spec", "A1:2,A2:1;A2:2,A1:2", "--seed", "42"];
    let a = generate(dir.path(), "a.json", &args);
    let b = generate(dir.path(), "b.json", &args);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = generate(dir.path(), "c.json", &["--family", "sum", "--spec", "A1:2,A2:1;A2:2,A1:2", "--seed", "43"]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn reports_are_stable_modulo_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "x.json", &["--family", "sum", "--spec", "A1:2,A2:2;A2:3,A1:1", "--seed", "5"]);
    let first = run(&["decompose", inst.to_str().unwrap()]);
    let second = run(&["decompose", inst.to_str().unwrap()]);
    assert_eq!(code(&first), 0);
    assert_eq!(
        without_wall_time(&String::from_utf8_lossy(&first.stdout)),
        without_wall_time(&String::from_utf8_lossy(&second.stdout))
    );
}

/// Exact match except for roundoff-level floats, which may differ
/// between platforms.
fn assert_matches_golden(got: &Value, want: &Value, at: &str) {
    match (got, want) {
        (Value::Object(g), Value::Object(w)) => {
            let keys = |m: &serde_json::Map<String, Value>| m.keys().filter(|k| *k != "wall_time_ms").cloned().collect::<Vec<_>>();
            assert_eq!(keys(g), keys(w), "keys at {at}");
            for k in keys(g) {
                assert_matches_golden(&g[&k], &w[&k], &format!("{at}.{k}"));
            }
        }
        (Value::Array(g), Value::Array(w)) => {
            assert_eq!(g.len(), w.len(), "length at {at}");
            for (i, (a, b)) in g.iter().zip(w).enumerate() {
                assert_matches_golden(a, b, &format!("{at}[{i}]"));
            }
        }
        (Value::Number(a), Value::Number(b)) if a.is_f64() || b.is_f64() => {
            assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() <= 1e-12, "{at}: {a} vs {b}");
        }
        _ => assert_eq!(got, want, "at {at}"),
    }
}

#[test]
fn golden_report() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let out = bin().current_dir(&golden).args(["decompose", "tensor_a1_a2.json"]).output().unwrap();
    assert_eq!(code(&out), 0);
    let expected_path = golden.join("tensor_a1_a2.report.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&expected_path, &out.stdout).unwrap();
    }
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(&expected_path).unwrap()).unwrap();
    assert_matches_golden(&json(&out), &expected, "$");
}

#[test]
fn non_doubly_commuting_pair_exits_3_and_names_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    // (S, S*) on C^2 commutes with neither itself nor its partner's adjoint
    let inst = write(
        dir.path(),
        "nc.json",
        r#"{"schema":"tetradecomp/1","dim":2,"mode":"tuple","operators":[
            [[[0,0],[0,0]],[[1,0],[0,0]]],
            [[[0,0],[1,0]],[[0,0],[0,0]]]]}"#,
    );
    let out = run(&["decompose", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let r = json(&out);
    assert_eq!(r["offending_pair"], serde_json::json!([1, 2]));
    assert!(r["residuals"]["offending_pair"].as_f64().unwrap() > 0.5);

    // commuting but not doubly commuting: (S, S)
    let inst = write(
        dir.path(),
        "ss.json",
        r#"{"schema":"tetradecomp/1","dim":2,"mode":"tuple","operators":[
            [[[0,0],[0,0]],[[1,0],[0,0]]],
            [[[0,0],[0,0]],[[1,0],[0,0]]]]}"#,
    );
    let out = run(&["decompose", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(json(&out)["error"].as_str().unwrap().contains("doubly commute"));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"dim\": 2, oops");
    assert_eq!(code(&run(&["decompose", bad.to_str().unwrap()])), 2);
    let ragged = write(
        dir.path(),
        "ragged.json",
        r#"{"schema":"tetradecomp/1","dim":2,"mode":"tuple","operators":[[[[1,0],[0,0]],[[0,0]]]]}"#,
    );
    assert_eq!(code(&run(&["decompose", ragged.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["decompose", "/nonexistent/file.json"])), 2);
}

#[test]
fn center_order_is_one_based_and_order_free() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "t.json", &["--family", "sum", "--spec", "A1:2,A2:1,A1:1;A2:1,A2:2,A1:1", "--seed", "9"]);
    let p = inst.to_str().unwrap();
    let base = json(&run(&["decompose", p]));
    let perm = json(&run(&["decompose", p, "--center-order", "3,1,2"]));
    for (sig, leaf) in base["leaves"].as_object().unwrap() {
        assert_eq!(leaf["dim"], perm["leaves"][sig]["dim"], "{sig}");
        assert_eq!(leaf["checksum"], perm["leaves"][sig]["checksum"], "{sig}");
    }
    assert_eq!(code(&run(&["decompose", p, "--center-order", "0,1,2"])), 2);
    assert_eq!(code(&run(&["decompose", p, "--center-order", "1,2"])), 2);
}

#[test]
fn batch_mode_writes_one_report_per_input() {
    let dir = tempfile::tempdir().unwrap();
    let inputs: Vec<PathBuf> = (0..4)
        .map(|s| generate(dir.path(), &format!("in{s}.json"), &["--family", "tensor", "--spec", "A2:2,A1:2", "--seed", &s.to_string()]))
        .collect();
    let out_dir = dir.path().join("reports");
    let mut args = vec!["decompose", "--jobs", "3", "--out-dir", out_dir.to_str().unwrap()];
    args.extend(inputs.iter().map(|p| p.to_str().unwrap()));
    assert_eq!(code(&run(&args)), 0);
    for s in 0..4 {
        let text = std::fs::read_to_string(out_dir.join(format!("in{s}.report.json"))).unwrap();
        let r: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(r["leaves"]["A2,A1"]["dim"], 4);
    }
}

#[test]
fn full_projections_flag_dumps_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "t.json", &["--family", "tensor", "--spec", "A1:1,A2:2", "--seed", "3"]);
    let r = json(&run(&["decompose", inst.to_str().unwrap(), "--full-projections"]));
    let rows = r["leaves"]["A1,A2"]["projection"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
}

#[test]
fn cnu_mode_on_planted_shift_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "s.json", &["--family", "shift", "--spec", "B2:2,B2:2;A2:1,B2:1"]);
    let out = run(&["decompose", inst.to_str().unwrap(), "--mode", "cnu"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["leaves"]["B2,B2"]["dim"], 3);
    // a unitary member has no c.n.u. decomposition
    let inst = generate(dir.path(), "u.json", &["--family", "tensor", "--spec", "A1:2", "--seed", "1"]);
    assert_eq!(code(&run(&["decompose", inst.to_str().unwrap(), "--mode", "cnu"])), 3);
}

#[test]
fn structured_instances_report_exact_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "s.json", &["--family", "shift", "--spec", "A1:2,B1:1;A2:2,B2:2", "--seed", "4"]);
    let r = json(&run(&["decompose", inst.to_str().unwrap()]));
    assert_eq!(r["structured"], true);
    assert_eq!(r["leaves"]["A1,B1"]["wandering_dim"], 1);
    assert_eq!(r["leaves"]["A2,B2"]["dim"], 2);
    assert_eq!(r["truth_max_deviation"], 0.0);
}

#[test]
fn tetra_point_examples() {
    let origin = json(&run(&["tetra-point", "0,0", "0,0", "0,0"]));
    assert_eq!(origin["region"], "Interior");
    let edge = json(&run(&["tetra-point", "0.3,0", "0.3,0", "1,0"]));
    assert_eq!(edge["region"], "ClosureBoundary");
    assert_eq!(edge["bE"], true);
    let far = json(&run(&["tetra-point", "2,0", "0,0", "0,0"]));
    assert_eq!(far["region"], "Outside");
    let neg = run(&["tetra-point", "-0.2,-0.1", "0.1,-0.3", "-0.05,0"]);
    assert_eq!(code(&neg), 0);
    assert_eq!(json(&neg)["region"], "Interior");
    assert_eq!(code(&run(&["tetra-point", "a,b", "0", "0"])), 2);
    assert_eq!(code(&run(&["tetra-point", "0,0", "0,0"])), 2);
    assert_eq!(String::from_utf8_lossy(&run(&["tetra-point", "0", "0", "0"]).stdout).lines().count(), 1);
}

#[test]
fn dilate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let zero_ab = write(dir.path(), "p.json", &scalar_triple(0.0, 0.0, 0.5));
    let out = run(&["dilate", zero_ab.to_str().unwrap(), "--depth", "4", "--verify-degree", "4"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert!(r["verification"]["worst"]["residual"].as_f64().unwrap() <= 1e-10);

    let wide = write(dir.path(), "w.json", &scalar_triple(0.8, 0.8, 0.0));
    let out = run(&["dilate", wide.to_str().unwrap(), "--depth", "2"]);
    assert_eq!(code(&out), 4);
    let r = json(&out);
    assert!((r["hypotheses"]["max_radius"].as_f64().unwrap() - 1.6).abs() < 1e-9);
    assert!(r["model"]["block_dim"].as_u64().unwrap() > 0);
    assert!(r["verification"].is_null());

    assert_eq!(code(&run(&["dilate", zero_ab.to_str().unwrap(), "--depth", "2", "--verify-degree", "3"])), 2);
    assert_eq!(code(&run(&["dilate", zero_ab.to_str().unwrap(), "--depth", "0"])), 2);

    let not_contraction = write(dir.path(), "big.json", &scalar_triple(1.5, 0.0, 0.0));
    assert_eq!(code(&run(&["dilate", not_contraction.to_str().unwrap()])), 3);
}

#[test]
fn generate_contract() {
    assert_eq!(code(&run(&["generate", "--family", "tensor", "--spec", "A1:0,A2:2"])), 2);
    assert_eq!(code(&run(&["generate", "--family", "tensor", "--spec", "A1:2;A2:2"])), 2);
    assert_eq!(code(&run(&["generate", "--family", "tensor", "--spec", "B1:2"])), 2);
    assert_eq!(code(&run(&["generate", "--family", "tensor", "--spec", "A1:8,A2:8,A1:9"])), 5);
    let out = run(&["generate", "--family", "tensor", "--spec", "A1:2,A2:2", "--seed", "1"]);
    let inst = json(&out);
    assert_eq!(inst["dim"], 4);
    assert_eq!(inst["truth"]["leaves"]["A1,A2"]["dim"], 4);
}

#[test]
fn tolerance_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "t.json", &["--family", "tensor", "--spec", "A1:1", "--seed", "1"]);
    let p = inst.to_str().unwrap();
    let tol_of = |out: Output| json(&out)["tol"].as_f64().unwrap();
    assert_eq!(tol_of(run(&["decompose", p])), 1e-9);
    let env = bin().env("TETRADECOMP_TOL", "1e-7").args(["decompose", p]).output().unwrap();
    assert_eq!(tol_of(env), 1e-7);
    let flag = bin().env("TETRADECOMP_TOL", "1e-7").args(["decompose", p, "--tol", "1e-8"]).output().unwrap();
    assert_eq!(tol_of(flag), 1e-8);
    let mut text: Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    text["tol"] = serde_json::json!(1e-10);
    let with_tol = write(dir.path(), "tol.json", &text.to_string());
    let inst_tol = bin().env("TETRADECOMP_TOL", "1e-7").args(["decompose", with_tol.to_str().unwrap()]).output().unwrap();
    assert_eq!(tol_of(inst_tol), 1e-10);
    let bad = bin().env("TETRADECOMP_TOL", "abc").args(["decompose", p]).output().unwrap();
    assert_eq!(code(&bad), 2);
}
