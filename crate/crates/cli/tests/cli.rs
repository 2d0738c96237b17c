use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pivotfun::frobenius::FrobeniusMonoid;
use pivotfun::upt::Upt;
use pivotfun::Tolerance;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pivotfun"));
    c.env_remove("PIVOTFUN_TOL");
    c
}

fn fixtures() -> TempDir {
    let dir = TempDir::new().unwrap();
    let out = bin().arg("fixtures").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

fn run(dir: &Path, args: &[&str]) -> (i32, Value, Output) {
    let out = bin().current_dir(dir).args(args).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v, out)
}

fn checks(v: &Value) -> &Vec<Value> {
    v["checks"].as_array().unwrap()
}

fn read<T: serde::de::DeserializeOwned>(p: PathBuf) -> T {
    pivotfun::json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn check_verdicts() {
    let fx = fixtures();
    let d = fx.path();
    assert_eq!(run(d, &["check", "monoid-trivial.json", "--kind", "frobenius"]).0, 0);
    assert_eq!(
        run(d, &["check", "functor-klein-twisted.json", "--kind", "functor"]).0,
        0
    );
    for (file, kind) in [
        ("group-klein.json", "group"),
        ("rep-klein-regular.json", "rep"),
        ("bimodule-rows2.json", "bimodule"),
        ("upt-pauli.json", "upt"),
        ("modification-pauli.json", "modification"),
    ] {
        assert_eq!(run(d, &["check", file, "--kind", kind]).0, 0, "{file}");
    }
    let (code, v, _) = run(d, &["check", "functor-klein-corrupted.json", "--kind", "functor"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    assert!(checks(&v)
        .iter()
        .any(|c| c["status"] == "fail" && c["witness"].as_str().is_some_and(|w| w.contains("(1,2)"))));
}

#[test]
fn parse_errors_exit_two_with_position() {
    let fx = fixtures();
    std::fs::write(fx.path().join("broken.json"), "{\n  \"rows\": 1,\n  oops\n}").unwrap();
    let (code, v, _) = run(fx.path(), &["check", "broken.json", "--kind", "upt"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "parse");
    assert!(v["message"].as_str().unwrap().contains("line 3"));
    let (code, _, _) = run(fx.path(), &["check", "missing.json", "--kind", "upt"]);
    assert_eq!(code, 2);
}

#[test]
fn dual_of_identity_is_identity() {
    let fx = fixtures();
    let (code, v, _) = run(fx.path(), &["dual", "upt-identity-z2.json"]);
    assert_eq!(code, 0);
    let dual: Upt = serde_json::from_value(v["result"].clone()).unwrap();
    let id: Upt = read(fx.path().join("upt-identity-z2.json"));
    let tol = Tolerance::default();
    for i in 0..id.objects().len() {
        assert!(tol.close(dual.component(i), id.component(i)));
    }
}

#[test]
fn pants_of_graded_z2() {
    let fx = fixtures();
    let (code, v, _) = run(fx.path(), &["pants", "upt-graded-z2.json", "--out", "pants.json"]);
    assert_eq!(code, 0);
    assert!(v.get("result").is_none());
    let m: FrobeniusMonoid = read(fx.path().join("pants.json"));
    assert_eq!(m.dim(), 4);
    assert_eq!(run(fx.path(), &["check", "pants.json", "--kind", "frobenius"]).0, 0);
}

#[test]
fn failing_input_writes_nothing() {
    let fx = fixtures();
    let (code, v, _) = run(
        fx.path(),
        &["pants", "upt-pauli-sign-flipped.json", "--out", "never.json"],
    );
    assert_eq!(code, 1);
    assert!(checks(&v)
        .iter()
        .any(|c| c["name"].as_str().unwrap().starts_with("input.monoidality")));
    assert!(!fx.path().join("never.json").exists());
}

#[test]
fn dagger_twice_round_trips() {
    let fx = fixtures();
    let d = fx.path();
    assert_eq!(run(d, &["dagger", "upt-pauli.json", "--out", "d1.json"]).0, 0);
    assert_eq!(run(d, &["dagger", "d1.json", "--out", "d2.json"]).0, 0);
    let (a, b): (Upt, Upt) = (read(d.join("upt-pauli.json")), read(d.join("d2.json")));
    let tol = Tolerance::default();
    for i in 0..a.objects().len() {
        assert!(tol.close(a.component(i), b.component(i)));
    }
    // Closure: emitted artifacts re-verify.
    assert_eq!(run(d, &["check", "d1.json", "--kind", "upt"]).0, 0);
    assert_eq!(run(d, &["dual", "upt-graded-klein.json", "--out", "dual.json"]).0, 0);
    assert_eq!(run(d, &["check", "dual.json", "--kind", "upt"]).0, 0);
}

#[test]
fn morita_decisions() {
    let fx = fixtures();
    let d = fx.path();
    let (code, _, _) = run(
        d,
        &[
            "morita",
            "monoid-matrix2.json",
            "monoid-trivial.json",
            "--witness",
            "bimodule-columns2.json",
            "bimodule-rows2.json",
        ],
    );
    assert_eq!(code, 0);
    let (code, v, _) = run(d, &["morita", "monoid-pointwise2.json", "monoid-trivial.json"]);
    assert_eq!(code, 1);
    let c = checks(&v).iter().find(|c| c["name"] == "center_dimension").unwrap();
    assert_eq!(c["witness"], "2 vs 1");
    let (code, v, _) = run(d, &["morita", "monoid-graded.json", "monoid-graded.json"]);
    assert_eq!(code, 3);
    assert_eq!(v["status"], "inconclusive");
}

#[test]
fn roundtrips() {
    let fx = fixtures();
    let d = fx.path();
    let id = "upt-identity-z2.json";
    let (code, v, _) = run(d, &["roundtrip", id, id, id, "tau-identity.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["deviation"].as_f64().unwrap(), 0.0);
    for tag in ["z2", "pauli"] {
        let f = |s: &str| format!("rt-{tag}-{s}.json");
        let (code, v, _) = run(d, &["roundtrip", &f("a1"), &f("a2"), &f("e"), &f("tau")]);
        assert_eq!(code, 0, "{tag}: {v}");
        assert!(v["result"]["deviation"].as_f64().unwrap() <= 1e-8);
        let (code, v, _) = run(d, &["roundtrip", &f("a1"), &f("a2"), &f("e"), &f("tau-corrupted")]);
        assert_eq!(code, 1);
        assert_eq!(v["stage"], "check_star_morphism");
    }
}

#[test]
fn classification() {
    let fx = fixtures();
    let d = fx.path();
    let (code, v, _) = run(d, &["classify-upt", "group-z2.json", "--max-dim", "2"]);
    assert_eq!(code, 0);
    let classes = v["result"]["classes"].as_array().unwrap();
    let mixed = classes
        .iter()
        .find(|c| {
            c["members"]
                .as_array()
                .unwrap()
                .iter()
                .any(|m| m == &serde_json::json!([1, 1]))
        })
        .unwrap();
    assert_eq!(mixed["center_dim"], 1);
    assert_eq!(mixed["pants"]["carrier"]["dim"], 4);
    let (code, v, _) = run(d, &["classify-upt", "group-trivial.json", "--max-dim", "3"]);
    assert_eq!(code, 0);
    let dims: Vec<u64> = v["result"]["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["dim"].as_u64().unwrap())
        .collect();
    assert_eq!(dims, vec![1, 2, 3]);
    let (code, _, _) = run(d, &["classify-upt", "group-z2.json", "--max-dim", "7"]);
    assert_eq!(code, 3);
}

#[test]
fn reports_are_deterministic_and_honour_tolerance() {
    let fx = fixtures();
    let d = fx.path();
    let args = [
        "roundtrip",
        "rt-pauli-a1.json",
        "rt-pauli-a2.json",
        "rt-pauli-e.json",
        "rt-pauli-tau.json",
    ];
    let (_, _, a) = run(d, &args);
    let (_, _, b) = run(d, &args);
    assert_eq!(a.stdout, b.stdout);
    let out = bin()
        .current_dir(d)
        .env("PIVOTFUN_TOL", "1e-6")
        .args(["check", "upt-pauli.json", "--kind", "upt"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["tol"].as_f64().unwrap() - 1e-6).abs() < 1e-18);
    let (_, v, _) = run(d, &["check", "upt-pauli.json", "--kind", "upt", "--tol", "1e-7"]);
    assert!((v["tol"].as_f64().unwrap() - 1e-7).abs() < 1e-18);
}
