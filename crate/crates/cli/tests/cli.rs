use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conewright"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn reals(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn build_symmetric() {
    let (code, v) = json(&["build", "--b", "1,1,1,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "geometry/1");
    assert_eq!(v["seed"], 0);
    assert_eq!(v["geometry"]["holed"], serde_json::json!([false, false, false, false]));
    for l in reals(&v["edge_lengths"]) {
        assert!((l - 2f64.sqrt().acosh()).abs() < 1e-12);
    }
}

#[test]
fn build_from_angles_and_holed() {
    let (code, v) = json(&["build", "--alpha", "1.2,1.3,1.4,1.5"]);
    assert_eq!(code, 0);
    assert_eq!(v["dihedrals_checked"], true);
    let (code, v) = json(&["build", "--b", "0.5,0.5,2,2,2"]);
    assert_eq!(code, 0);
    assert_eq!(v["geometry"]["holed"][0], true);
}

#[test]
fn invert_and_angles() {
    let (code, v) = json(&["invert", "--alpha", "0,0,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(reals(&v["b"]["q"]), vec![1.0; 4]);
    assert_eq!(v["b"]["t"].as_f64().unwrap(), 0.0);
    let (_, v) = json(&["invert", "--cosines", "0,0,0,0"]);
    assert!((v["b"]["t"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let (_, v) = json(&["angles", "--b", "1,1,1,1,1"]);
    assert!(reals(&v["alpha"]).iter().all(|a| (a - std::f64::consts::FRAC_PI_2).abs() < 1e-15));
}

#[test]
fn volumes() {
    let (code, v) = json(&["volume", "--b", "1,1,1,1,0"]);
    assert_eq!(code, 0);
    assert!((v["volume"]["value"].as_f64().unwrap() - 3.663_862_376_7).abs() < 1e-4);
    let (code, v) = json(&["volume", "--b", "1,1,1,1,1", "--quadrature"]);
    assert_eq!(code, 0, "{v}");
    let (code, _) = json(&["volume", "--sphere", "1"]);
    assert_eq!(code, 0);
    // A coarse sphere misses a tight tolerance: a check failure, not an input error.
    let (code, v) = json(&["volume", "--sphere", "1", "--refine", "1", "--tol", "1e-6"]);
    assert_eq!((code, &v["pass"]), (1, &Value::Bool(false)));
}

#[test]
fn schlafli_path_file() {
    let path = data("symmetric_path.json");
    let (code, v) = json(&["schlafli", "--path", path.to_str().unwrap(), "--steps", "200"]);
    assert_eq!(code, 0);
    assert!(v["report"]["max_rel_error"].as_f64().unwrap() < 1e-4);
    let (code, _) = json(&["schlafli", "--path", path.to_str().unwrap(), "--steps", "200", "--tol", "1e-12"]);
    assert_eq!(code, 1);
}

#[test]
fn glue_check_with_shipped_spec() {
    let spec = data("weave4.json");
    let (code, v) = json(&["glue-check", "--b", "1.1,0.9,1,1,0.8", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["edges"].as_array().unwrap().len(), 20);
    let text = run(&["--format", "text", "glue-check", "--b", "1,1,1,1,1"]);
    let s = String::from_utf8(text.stdout).unwrap();
    assert!(s.lines().nth(1).unwrap().starts_with("edge"));
    // Trapezohedron labels need a parameter.
    assert_eq!(run(&["glue-check"]).status.code(), Some(2));
}

#[test]
fn framing_with_oracle() {
    let h = data("handles_example.json");
    let (code, v) = json(&["framing", "--handles", h.to_str().unwrap(), "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["group"]["index"], 2);
    assert_eq!(v["oracle"]["missing"], 0);
    assert_eq!(v["oracle"]["extra"], 0);
}

#[test]
fn lift_and_cone_checks() {
    let rep = data("weave_rep.json");
    let (code, v) = json(&["lift-check", "--rep", rep.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["lift"]["liftable"], false);
    assert_eq!(v["lift"]["signs"], serde_json::json!([-1, -1]));
    let (code, v) = json(&["cone-check", "--mu", "1,0,0,0,0,0,1,0", "--lambda", "-3,0,-2,0,-4,0,-3,0"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"]["kind"], "cone_pair");
    // Commuting parabolics with parallel translations.
    let (code, v) = json(&["cone-check", "--mu", "1,0,1,0,0,0,1,0", "--lambda", "1,0,3,0,0,0,1,0"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"]["reason"], "rank_one");
}

#[test]
fn mesh_export_writes_obj_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("oct.obj");
    let (code, v) = json(&["mesh-export", "--b", "1,1,1,1,0", "--clip-height", "5", "--out", obj.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["vertices"], 6);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 6);
    // Half of the sixteen triangle slots collapse when Q̃ᵢ = P̃ᵢ.
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8);
    assert!(text.contains("v 0 0 5"));
    let side: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("oct.obj.ideal.json")).unwrap()).unwrap();
    assert_eq!(side["schema"], "ideal-vertices/1");
    assert_eq!(side["ideal"].as_array().unwrap().len(), 6);
    let stdout = run(&["mesh-export", "--sphere", "0.5", "--refine", "1", "--format", "obj"]);
    assert!(String::from_utf8(stdout.stdout).unwrap().starts_with("# conewright surface mesh"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"schema\": \"rep/1\",\n  \"generators\": [\n").unwrap();
    let out = run(&["lift-check", "--rep", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json") && err.contains("line"), "{err}");
    for args in [
        &["build", "--b", "1,1,1"][..],
        &["build", "--b", "2,0.5,1,1,0"],
        &["invert", "--cosines", "-1,0,0,0"],
        &["volume", "--b", "1,1,1,1,1", "--tol", "-1"],
        &["angles", "--b", "1,1,1,1,1", "--format", "obj"],
        &["acceptance", "--suite", "11"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [&["volume", "--b", "0.9,1.2,1,1.1,0.7"][..], &["acceptance", "--suite", "2", "--seed", "7"]] {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let (_, v) = json(&["acceptance", "--suite", "3", "--seed", "7"]);
    assert_eq!(v["seed"], 7);
}

#[test]
fn acceptance_suite_passes() {
    let out = run(&["--format", "text", "acceptance", "--suite", "all"]);
    let text = String::from_utf8(out.stdout).unwrap();
    print!("{text}");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}
