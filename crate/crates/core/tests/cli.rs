use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use plonka_core::builders::pz2;
use plonka_core::cli::example_sum2;
use plonka_core::format::{AlgebraFile, SystemFile};
use plonka_core::{Algebra, ResiduatedPoset};

fn plonka(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_plonka"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn load(path: &Path) -> ResiduatedPoset {
    AlgebraFile::from_json(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_algebra()
        .unwrap()
}

#[test]
fn check_fig1() {
    let out = plonka(&["check", &fixture("fig1.json")], None);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let s = text(&out.stdout);
    assert!(s.contains("balanced: true"), "{s}");
    assert!(s.contains("H4: false at (p, a)"), "{s}");
    assert!(s.contains("Idp: {1, p, q}"), "{s}");
}

#[test]
fn decompose_fig1_refuses() {
    let out = plonka(&["decompose", &fixture("fig1.json")], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("H4"), "{}", text(&out.stderr));
}

#[test]
fn pz2_pipeline() {
    let example = plonka(&["example", "pz2"], None);
    assert_eq!(example.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    let out = plonka(&["decompose", "-", "--out", sys.to_str().unwrap()], Some(&text(&example.stdout)));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let back = dir.path().join("back.json");
    let out = plonka(&["compose", sys.to_str().unwrap(), "--out", back.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let a = load(&back);
    let e: Vec<usize> = ["⊥", "1", "0", "⊤"].iter().map(|l| a.lookup(l).unwrap()).collect();
    assert_eq!(pz2().first_disagreement(&a, &e), None);
}

#[test]
fn complex_from_monoid_file() {
    let out = plonka(&["complex", &fixture("z2-monoid.json")], None);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let a = AlgebraFile::from_json(&text(&out.stdout)).unwrap().to_algebra().unwrap();
    assert_eq!(a.len(), 4);
    assert!(a.balanced());
}

#[test]
fn compose_with_equal_maps_fails_o1() {
    let example = plonka(&["example", "pz2"], None);
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    plonka(&["decompose", "-", "--out", sys.to_str().unwrap()], Some(&text(&example.stdout)));
    let mut file = SystemFile::from_json(&std::fs::read_to_string(&sys).unwrap()).unwrap();
    file.psi = file.phi.clone();
    std::fs::write(&sys, file.to_json()).unwrap();
    let out = plonka(&["compose", sys.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("O1"), "{}", text(&out.stderr));
}

#[test]
fn malformed_input_exits_2() {
    for input in ["not json", "{\"name\": \"x\"}"] {
        let out = plonka(&["check", "-"], Some(input));
        assert_eq!(out.status.code(), Some(2), "{input}");
    }
    let out = plonka(&["check", "/nonexistent/file.json"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_residuated_input_exits_1() {
    let mut file = AlgebraFile::from_algebra("pz2", &pz2(), false);
    // ⊤·⊤ = ⊥ breaks monotonicity
    file.mult[3][3] = "⊥".into();
    let out = plonka(&["check", "-"], Some(&file.to_json()));
    assert_eq!(out.status.code(), Some(1), "{}", text(&out.stdout));
}

#[test]
fn sweeps() {
    let out = plonka(&["sweep", "--max-size", "3", "--property", "prop4"], None);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let out = plonka(&["sweep", "--max-size", "4", "--property", "roundtrip", "--planted-bug"], None);
    assert_eq!(out.status.code(), Some(1));
    let out = plonka(&["sweep", "--max-size", "3", "--property", "nonsense"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sum2_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let sys = dir.path().join("sys.json");
    let back = dir.path().join("back.json");
    let dot = dir.path().join("d.dot");
    assert_eq!(plonka(&["example", "sum2", "--out", f.to_str().unwrap()], None).status.code(), Some(0));
    let out = plonka(
        &["decompose", f.to_str().unwrap(), "--out", sys.to_str().unwrap(), "--dot", dot.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    assert_eq!(plonka(&["compose", sys.to_str().unwrap(), "--out", back.to_str().unwrap()], None).status.code(), Some(0));
    let original = example_sum2();
    let composed = load(&back);
    let e: Vec<usize> = (0..original.len())
        .map(|x| {
            let l = original.label(x);
            composed.lookup(l).or_else(|_| composed.lookup(l.split_once('.').unwrap().1)).unwrap()
        })
        .collect();
    assert_eq!(original.first_disagreement(&composed, &e), None);
}
