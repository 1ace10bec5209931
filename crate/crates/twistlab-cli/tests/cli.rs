use std::path::Path;
use std::process::{Command, Output};

fn twistlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const QF: &str = r#"
seed = 1
[[cases]]
name = "qf"
twist = { gallery = "q_flip", q = 0.5 }
subspace = { delta = [4.0, 0.25] }
subspace_k = { delta = [16.0, 0.0625] }
"#;

#[test]
fn q_flip_all_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "qf.toml", QF);
    let out = twistlab(&["run", "--config", &cfg, "--out", "r.json"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    let checks = report["payload"]["cases"][0]["checks"].as_array().unwrap();
    assert!(checks
        .iter()
        .all(|c| c["anchor"].as_str().is_some_and(|a| !a.is_empty())));
    assert!(checks.iter().all(|c| c["status"] != "fail"));
}

#[test]
fn proj_pair_negative_mode() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[[cases]]
name = "pp"
twist = { gallery = "proj_pair", q = 0.5, e = [1.0, 0.0], e_tilde = [1.0, 0.0] }
subspace = { delta = [4.0, 0.25] }
expect_fail = { crossing = 1e-3, locality = 1e-3 }
"#;
    let cfg = write(dir.path(), "pp.toml", text);
    let out = twistlab(&["run", "--config", &cfg, "--suite", "modular"], dir.path());
    assert_eq!(out.status.code(), Some(1), "tomita still fails undeclared");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("xfail  crossing"));
    assert!(stdout.contains("xfail  locality"));

    let text = text.replace("locality = 1e-3", "locality = 1e-3, tomita = 1e-3");
    let cfg = write(dir.path(), "pp2.toml", &text);
    let out = twistlab(&["run", "--config", &cfg, "--suite", "modular"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn declared_failure_that_passes_is_xpass() {
    let dir = tempfile::tempdir().unwrap();
    let text = QF.replace(
        "subspace_k",
        "expect_fail = { crossing = 1e-3 }\nsubspace_k",
    );
    let cfg = write(dir.path(), "x.toml", &text);
    let out = twistlab(&["run", "--config", &cfg, "--suite", "modular"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("xpass  crossing"));
}

#[test]
fn malformed_matrix_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "t.json",
        r#"{"rows": 4, "cols": 4, "data": [[1.0, 0.0]]}"#,
    );
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[[cases]]\nname = \"bad\"\ntwist = { matrix_file = \"t.json\" }\nsubspace = { delta = [4.0, 0.25] }\n",
    );
    assert_eq!(
        twistlab(&["run", "--config", &cfg], dir.path())
            .status
            .code(),
        Some(2)
    );
    let cfg = write(dir.path(), "junk.toml", "this is = = not toml");
    assert_eq!(
        twistlab(&["run", "--config", &cfg], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn resource_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = QF.replace("seed = 1", "seed = 1\n[cutoffs]\nN = 13");
    let cfg = write(dir.path(), "big.toml", &text);
    assert_eq!(
        twistlab(&["run", "--config", &cfg, "--suite", "fock"], dir.path())
            .status
            .code(),
        Some(3)
    );
    let out = twistlab(
        &["classify", "--twist", "identity:d=5", "--nmax", "7"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn demo_writes_every_member_and_rejects_unwritable_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = twistlab(&["demo", "--out", "gallery"], dir.path());
    assert!(out.status.success());
    let files: Vec<_> = std::fs::read_dir(dir.path().join("gallery"))
        .unwrap()
        .collect();
    assert_eq!(files.len(), 11);

    let blocker = write(dir.path(), "plain_file", "");
    let out = twistlab(&["demo", "--out", &format!("{blocker}/sub")], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn each_demo_member_meets_its_expectations() {
    let dir = tempfile::tempdir().unwrap();
    assert!(twistlab(&["demo", "--out", "."], dir.path())
        .status
        .success());
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        let out = twistlab(
            &["run", "--quiet", "--config", p.to_str().unwrap()],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{}", p.display());
    }
}

#[test]
fn classify_prints_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = twistlab(
        &["classify", "--twist", "q_flip:q=0.5", "--nmax", "4"],
        dir.path(),
    );
    assert!(out.status.success());
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("verdict strict"));
    assert_eq!(
        s.lines()
            .filter(|l| l.trim_start().starts_with("n = "))
            .count(),
        4
    );
    assert_eq!(
        twistlab(&["classify", "--twist", "nope"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn npoint_emits_diagram_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "qf.toml", QF);
    let out = twistlab(&["npoint", "--config", &cfg, "--order", "6"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let diagrams = v[0]["diagrams"].as_array().unwrap();
    assert_eq!(diagrams.len(), 15);
    let sum: f64 = diagrams
        .iter()
        .map(|d| d["value"][0].as_f64().unwrap())
        .sum();
    assert!((sum - v[0]["wightman"][0].as_f64().unwrap()).abs() < 1e-8);
    assert_eq!(
        twistlab(&["npoint", "--config", &cfg, "--order", "3"], dir.path())
            .status
            .code(),
        Some(2)
    );
}
