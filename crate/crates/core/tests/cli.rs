use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_oscillift");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn case_ii_config() -> Value {
    json!({"family": {"beta": [0, 0, 1, 0], "gamma": [1, 2, 1]}, "request": {"case": "II"}})
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &case_ii_config());
    let sols = dir.path().join("s.json");
    let o = run(&["solve", "--input", s(&cfg), "--output", s(&sols)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&sols).unwrap()).unwrap();
    let sol = &file["solutions"][0];
    assert_eq!(sol["case"], "II");
    assert_eq!(sol["a2"]["rational"], "-4");
    let bt: Vec<&str> = (0..3).map(|i| sol["beta_tilde"][i]["rational"].as_str().unwrap()).collect();
    assert_eq!(bt, ["-2", "2", "1"]);

    let o = run(&["verify", "--input", s(&sols)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_out(&o);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["reports"][0]["oracle_match"], true);

    // a tampered a₂ no longer matches its Q family
    let mut bad = file.clone();
    bad["solutions"][0]["a2"] = json!({"decimal": "-3", "rational": "-3"});
    let bad = write(&dir, "bad.json", &bad);
    let o = run(&["verify", "--input", s(&bad)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json_out(&o)["all_pass"], false);
}

#[test]
fn case_i_example_has_no_lift() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &json!({"family": {"beta": [0, 1, 0, 2], "gamma": [1, 1, 2]}, "request": {"case": "I"}}));
    let o = run(&["solve", "--input", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no solution") && err.contains("E2"), "{err}");

    let o = run(&["solve", "--input", s(&cfg), "--paper-literal"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_out(&o);
    assert_eq!(v["rejected"][0]["a2"]["rational"], "-4");
    assert_eq!(v["rejected"][0]["transcription"], "paper-literal");
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["solve", "--input", s(&missing)]).status.code(), Some(1));

    let wrong = write(&dir, "w.json", &json!({"family": {"beta": [0, 1, 0, 1], "gamma": [1, 1, 2]}, "request": {"case": "I"}}));
    let o = run(&["solve", "--input", s(&wrong)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("wrong case"));

    let short = write(&dir, "short.json", &json!({"beta": [0, 1], "gamma": [1]}));
    assert_eq!(run(&["solve", "--input", s(&short)]).status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
}

#[test]
fn empty_solution_list_exits_two() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "e.json", &json!({"family": {"beta": [0, 0, 1, 0], "gamma": [1, 2, 1]}, "solutions": []}));
    let o = run(&["verify", "--input", s(&empty)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nothing to verify"));
}

#[test]
fn spectrum_command() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &case_ii_config());
    let o = run(&["spectrum", "--input", s(&cfg), "--dim", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["family"]["dim"], 16);
    assert!(v["family"]["max_rel_dev"].as_f64().unwrap() <= 1e-12);
    let first = v["family"]["eigenvalues"][0].as_f64().unwrap();
    assert!((first - 2.0).abs() <= 1e-12, "λ_0 = 2γ_1, got {first}");

    assert_eq!(run(&["spectrum", "--input", s(&cfg), "--dim", "1"]).status.code(), Some(1));
    let quasi = write(&dir, "q.json", &json!({"beta": [0, 0, 1, 0], "gamma": [1, -2, 1], "definiteness": "quasi"}));
    let o = run(&["spectrum", "--input", s(&quasi)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("positive-definite"));
}

#[test]
fn spectrum_of_lifts_from_solutions() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &case_ii_config());
    let sols = dir.path().join("s.json");
    assert_eq!(run(&["solve", "--input", s(&cfg), "--output", s(&sols)]).status.code(), Some(0));
    let o = run(&["spectrum", "--input", s(&sols), "--dim", "32"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["lifts"][0]["algebras_equal"], true);
    assert_eq!(v["lifts"][0]["spectrum"]["eigenvalues"], v["family"]["eigenvalues"]);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &json!({"family": {"beta": [0, 1, 0, 2], "gamma": [1, 1, 2]}}));
    let a = run(&["report", "--input", s(&cfg)]);
    let b = run(&["report", "--input", s(&cfg)]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn report_and_text_format() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &case_ii_config());
    let o = run(&["report", "--input", s(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["dimension"], "infinite");
    assert!(v["relations"]["lowering_raising"].as_f64().unwrap() <= 1e-13);

    let o = run(&["report", "--input", s(&cfg), "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("dimension infinite") && text.contains("verified=true"), "{text}");
}

#[test]
fn lambda_grid_sweep() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &json!({"family": {"beta": [0, 1, 0, 2], "gamma": [1, 1, 2]}, "request": {"case": "V"}}));
    let o = run(&["solve", "--input", s(&cfg), "--lambda-grid", "0.1:0.5:0.1"]);
    assert!(matches!(o.status.code(), Some(0) | Some(2)));
    let v = json_out(&o);
    assert_eq!(v["request"]["lambda"].as_array().unwrap().len(), 5);
    let bad = run(&["solve", "--input", s(&cfg), "--lambda-grid", "0.5:0.1:0.1"]);
    assert_eq!(bad.status.code(), Some(1));
}
