use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQUARE: &str = r#"{"id": "square", "dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]], "simplices": {"2": [[0,1,2],[0,2,3]]}}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roughbody"))
        .current_dir(dir)
        .env_remove("ROUGHBODY_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("square.json"), SQUARE).unwrap();
    fs::write(
        dir.path().join("x1.json"),
        r#"{"mesh": "square", "degree": 1, "coefficients": [[0, 0.5], [3, 1.0]]}"#,
    )
    .unwrap();
    fs::write(
        dir.path().join("x2.json"),
        r#"{"mesh": "square", "degree": 1, "coefficients": [[2, -0.75]]}"#,
    )
    .unwrap();
    dir
}

#[test]
fn stokes_on_the_square_passes() {
    let dir = setup();
    let o = run(dir.path(), &["verify", "stokes", "--mesh", "square.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_stdout(&o)["passed"], true);
}

#[test]
fn koch_level_three_body_file() {
    let dir = setup();
    let o = run(
        dir.path(),
        &["fractal", "--type", "koch", "--level", "3", "--out", "koch.json", "--csv", "koch.csv"],
    );
    assert_eq!(o.status.code(), Some(0));
    let report = json_stdout(&o);
    let p = report["perimeter"].as_f64().unwrap();
    assert!((p - 3.0 * (4.0f64 / 3.0).powi(3)).abs() < 1e-9);
    let body: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("koch.json")).unwrap()).unwrap();
    assert_eq!(body["role"], "body");
    assert_eq!(body["mesh"], "koch.mesh.json");
    let csv = fs::read_to_string(dir.path().join("koch.csv")).unwrap();
    assert!(csv.starts_with("level,perimeter,area,flat_distance,annexed_area,ratio\n"));
    assert_eq!(csv.lines().count(), 5);
    // The written files load back and the body satisfies Stokes.
    let o = run(dir.path(), &["verify", "stokes", "--mesh", "koch.mesh.json", "--body", "koch.json"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn malformed_mesh_reports_the_pointer() {
    let dir = setup();
    fs::write(dir.path().join("bad.json"), r#"{"dim": 2, "vertices": [[0,0],[1,0],[0,1]], "simplices": {"2": [[0,1,9]]}}"#).unwrap();
    let o = run(dir.path(), &["mesh", "validate", "--mesh", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/simplices/2/0"));
    let o = run(dir.path(), &["mesh", "validate", "--mesh", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn chain_must_name_its_mesh() {
    let dir = setup();
    fs::write(dir.path().join("t.json"), r#"{"mesh": "other", "degree": 1, "coefficients": [[0, 1.0]]}"#).unwrap();
    let o = run(dir.path(), &["flatnorm", "--mesh", "square.json", "--chain", "t.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/mesh"));
}

#[test]
fn flatnorm_of_the_square_boundary() {
    let dir = setup();
    let edges = r#"{"mesh": "square", "degree": 1, "coefficients": [[0, 1.0], [1, 1.0], [2, -1.0]]}"#;
    fs::write(dir.path().join("t.json"), edges).unwrap();
    let o = run(dir.path(), &["flatnorm", "--mesh", "square.json", "--chain", "t.json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_stdout(&o);
    assert!(r["value"].as_f64().unwrap() <= r["mass"].as_f64().unwrap() + 1e-12);
    assert!(r["R"].is_array() && r["S"].is_array() && r["iterations"].is_u64());
}

#[test]
fn flux_round_trip_and_adversary() {
    let dir = setup();
    let o = run(
        dir.path(),
        &["flux", "build", "--mesh", "square.json", "--cochain", "x1.json", "--cochain", "x2.json", "--out", "flux.json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = run(dir.path(), &["flux", "roundtrip", "--mesh", "square.json", "--flux", "flux.json", "--csv", "rt.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_stdout(&o);
    assert!(r["max_deviation"][0].as_f64().unwrap() <= 1e-9);
    assert!(fs::read_to_string(dir.path().join("rt.csv")).unwrap().starts_with("component,flat_norm,bound,max_deviation"));

    let o = run(dir.path(), &["verify", "balance", "--mesh", "square.json", "--flux", "flux.json"]);
    assert_eq!(o.status.code(), Some(0));

    run(dir.path(), &["flux", "build", "--mesh", "square.json", "--kind", "counting", "--out", "count.json"]);
    let o = run(dir.path(), &["verify", "balance", "--mesh", "square.json", "--flux", "count.json", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_stdout(&o)["witness"]["error"], "DeclaredConstantViolated");
}

#[test]
fn power_and_stress_reports() {
    let dir = setup();
    let o = run(
        dir.path(),
        &["verify", "virtual-power", "--mesh", "square.json", "--cochain", "x1.json", "--cochain", "x2.json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = run(dir.path(), &["stress", "report", "--mesh", "square.json", "--csv", "s.csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_stdout(&o)["piola_cauchy_deviation"], 0.0);
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("term,spatial,material,deviation\n"));

    fs::write(dir.path().join("mirror.json"), r#"{"mesh": "square", "images": [[0,0],[-1,0],[-1,1],[0,1]]}"#).unwrap();
    let o = run(dir.path(), &["stress", "report", "--mesh", "square.json", "--map", "mirror.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_stdout(&o)["witness"]["error"], "OrientationReversal");

    fs::write(dir.path().join("fold.json"), r#"{"mesh": "square", "images": [[0,0],[1,0],[0,0],[-1,0]]}"#).unwrap();
    let o = run(dir.path(), &["verify", "virtual-power", "--mesh", "square.json", "--map", "fold.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn product_rule_campaign() {
    let dir = setup();
    let o = run(dir.path(), &["verify", "product-rule", "--mesh", "square.json", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_stdout(&o)["violations"], 0);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = setup();
    let args = ["verify", "product-rule", "--mesh", "square.json", "--trials", "4", "--seed", "11"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_roughbody"))
        .current_dir(dir.path())
        .env("ROUGHBODY_SEED", "11")
        .args(["verify", "product-rule", "--mesh", "square.json", "--trials", "4"])
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}
