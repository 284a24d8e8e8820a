use std::path::PathBuf;
use std::process::{Command, Output};

use lagflux_core::engine::Provenance;

fn lagflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lagflux")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lagflux-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn split_bound_names_its_source() {
    let o = lagflux(&["bound", "--family", "split", "--x", "1,3", "--class", "1,2"]);
    assert!(o.status.success());
    let expected = format!("exact 1 [{}]", Provenance::PlaneDiskCount.tag());
    assert!(stdout(&o).contains(&expected), "{}", stdout(&o));
}

#[test]
fn surface_bound_on_the_negative_side() {
    let o = lagflux(&["bound", "--family", "surface", "--areas", "2,5", "--separating", "--k", "-2", "--json"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let tag = format!(r#""tag": "{}""#, Provenance::SurfaceSeparating.tag());
    assert!(out.contains(r#""value": "5/2""#) && out.contains(&tag), "{out}");
}

#[test]
fn surface_verify_certifies_the_chord_bound() {
    let o = lagflux(&["verify", "--family", "surface", "--A", "3", "--k", "3", "--eps", "1/20", "--samples", "256"]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(out.contains("Δ_H = 1\n"), "{out}");
    assert!(out.contains("[ok] min chord ≥ A/k − 5ε = 0.75"), "{out}");
}

#[test]
fn problem_files_are_read_and_errors_located() {
    let good = scratch("good.toml");
    std::fs::write(&good, "family = \"s2s2\"\n\n[s2s2]\nx = [\"3/4\", \"1/4\"]\nclass = [1, -1]\n").unwrap();
    let o = lagflux(&["bound", "--problem", good.to_str().unwrap()]);
    let expected = format!("exact 3/4 [{}]", Provenance::QuadricLattice.tag());
    assert!(stdout(&o).contains(&expected), "{}", stdout(&o));

    let bad = scratch("bad.toml");
    std::fs::write(&bad, "family = \"s2s2\"\n\n[s2s2]\nx = [\"3/4\", \"1/x\"]\nclass = [1, -1]\n").unwrap();
    let o = lagflux(&["bound", "--problem", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn errors_exit_nonzero() {
    let o = lagflux(&["verify", "--family", "cpn", "--x", "1/3,1/3", "--class", "1,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("family mismatch"));
    let o = lagflux(&["bound", "--family", "split", "--x", "0,1", "--class", "1,1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn diagram_output_is_byte_identical() {
    let a = scratch("a.svg");
    let b = scratch("b.svg");
    assert!(lagflux(&["diagram", "--x", "1,3", "--window", "3", "--out", a.to_str().unwrap()]).status.success());
    assert!(lagflux(&["diagram", "--x", "1,3", "--window", "-3,3,-3,3", "--out", b.to_str().unwrap()])
        .status
        .success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn selftest_passes_with_one_thread() {
    let o = Command::new(env!("CARGO_BIN_EXE_lagflux"))
        .arg("selftest")
        .env("LAGFLUX_THREADS", "1")
        .output()
        .unwrap();
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(!out.contains("FAIL"), "{out}");
}
