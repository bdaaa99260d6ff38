use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn nplectic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nplectic"))
        .args(args)
        .env_remove("NPLECTIC_ARITY_CAP")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn m(name: &str) -> String {
    model(name).display().to_string()
}

#[test]
fn identities_on_the_plane() {
    let out = nplectic(&["identities", "--pair", &m("symplectic-plane.json"), "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["passed"], true);
    assert_eq!(r["results"]["fundamental_pairing"].as_array().unwrap().len(), 3);
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty(), "timing goes to stderr");
}

#[test]
fn su2_cartan_cohomology_table() {
    let out = nplectic(&["cohomology", "--structure", &m("su2-cartan.json"), "--window", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["window"], 0);
    let rows = r["results"]["hamiltonian"].as_array().unwrap();
    let nonzero: Vec<(i64, u64)> = rows
        .iter()
        .filter(|row| row["rank"].as_u64().unwrap() > 0)
        .map(|row| (row["degree"].as_i64().unwrap(), row["rank"].as_u64().unwrap()))
        .collect();
    assert_eq!(nonzero, vec![(1, 3)]);
    let ce: Vec<u64> = r["results"]["chevalley_eilenberg"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["rank"].as_u64().unwrap())
        .collect();
    assert_eq!(ce, vec![1, 0, 0, 1]);
}

#[test]
fn malformed_input_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"family\": \"constant\",\n  \"dimension\": 3,\n  \"structure_constants\": [[1, 2, 3, \"1/\"]]\n}\n").unwrap();
    let out = nplectic(&["validate-pair", "--pair", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("column"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn zero_index_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(&path, r#"{"family": "constant", "dimension": 2, "structure_constants": [[0, 1, 1, "1"]]}"#).unwrap();
    let out = nplectic(&["validate-pair", "--pair", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1-based"));
}

#[test]
fn failed_check_exits_1() {
    let out = nplectic(&[
        "momentum-check",
        "--structure",
        &m("symplectic-plane.json"),
        "--momentum",
        &m("rotation-momentum-corrupted.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["results"]["gate_passed"], false);
    assert_eq!(r["results"]["gate"][0]["residual"], "-e^[1]");
}

#[test]
fn certified_momentum_map() {
    let out = nplectic(&[
        "momentum-check",
        "--structure",
        &m("symplectic-plane.json"),
        "--momentum",
        &m("rotation-momentum.json"),
        "--max-arity",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["certified"], true);
}

#[test]
fn caps_exit_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_nplectic"))
        .args(["jacobi", "--pair", &m("su2.json"), "--max-arity", "5"])
        .env("NPLECTIC_ARITY_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = nplectic(&["cohomology", "--structure", &m("su2-cartan.json"), "--window", "99"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn env_cap_is_recorded() {
    let out = Command::new(env!("CARGO_BIN_EXE_nplectic"))
        .args(["jacobi", "--pair", &m("heisenberg.json"), "--max-arity", "3", "--instances", "2"])
        .env("NPLECTIC_ARITY_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["arity_cap"], 4);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = nplectic(&[
            "poisson",
            "--structure",
            &m("su2-cartan.json"),
            "--window",
            "0",
            "--max-arity",
            "4",
            "--seed",
            "11",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn every_command_runs_on_the_models() {
    let plane = m("symplectic-plane.json");
    let cases: Vec<Vec<String>> = vec![
        vec!["validate-pair".into(), "--pair".into(), m("heisenberg.json")],
        vec!["validate-morphism".into(), "--morphism".into(), m("su2-identity.json")],
        vec!["bracket".into(), "--pair".into(), plane.clone(), "--elements".into(), m("plane-tensors.json")],
        vec!["differential".into(), "--pair".into(), m("su2.json"), "--elements".into(), m("su2-cotensors.json")],
        vec!["contract".into(), "--pair".into(), plane.clone(), "--elements".into(), m("plane-elements.json")],
        vec!["lie-derivative".into(), "--pair".into(), plane.clone(), "--elements".into(), m("plane-elements.json")],
        vec!["nplectic-check".into(), "--structure".into(), plane.clone(), "--elements".into(), m("plane-tensors.json")],
        vec!["jacobi".into(), "--linf".into(), m("abelian-complex.json")],
        vec!["jacobi".into(), "--pair".into(), m("su2-cartan.json"), "--max-arity".into(), "3".into()],
        vec!["poisson".into(), "--structure".into(), plane.clone(), "--max-arity".into(), "3".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = nplectic(&refs);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert_eq!(r["command"], args[0].as_str());
    }
}

#[test]
fn differential_of_a_one_form() {
    let out = nplectic(&["differential", "--pair", &m("su2.json"), "--elements", &m("su2-cotensors.json")]);
    let r = report(&out);
    assert_eq!(r["results"][0]["display"], "-e^[1,2]");
}
