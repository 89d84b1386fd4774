//! End-to-end checks of the qhodge binary: canonical text output,
//! round-tripping through the printer, exit codes, JSON shapes, and
//! the result cache.

use std::process::Command;

fn qhodge(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_qhodge"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
        out.status.code().unwrap_or(-1),
    )
}

fn stdout_of(args: &[&str]) -> String {
    let (stdout, stderr, code) = qhodge(args);
    assert_eq!(code, 0, "qhodge {:?} failed: {}", args, stderr);
    stdout.trim_end().to_string()
}

#[test]
fn canonical_normal_forms() {
    assert_eq!(stdout_of(&["normal-form", "c*a"]), "q^-1 * a*c");
    assert_eq!(stdout_of(&["normal-form", "as*a + cs*c"]), "1");
    assert_eq!(stdout_of(&["normal-form", "wm ∧ wm"]), "0");
    assert_eq!(stdout_of(&["normal-form", "a*as"]), "1 - q^2 * c*cs");
    assert_eq!(stdout_of(&["normal-form", "q^-2 * a * wz"]), "q^-2 * a * wz");
}

#[test]
fn printed_output_reparses_to_itself() {
    let samples = [
        "c*a",
        "a*as + q^3 * c^2",
        "(1 + q^2) * wm ∧ wp - a * wz ∧ wm",
        "wm ⊗ wp - q^2 * wp ⊗ wm",
        "cs*c*a - 1/7",
    ];
    for s in samples {
        let printed = stdout_of(&["normal-form", s]);
        let reprinted = stdout_of(&["normal-form", &printed]);
        assert_eq!(printed, reprinted, "printer fixed point for '{}'", s);
    }
}

#[test]
fn braiding_inverts() {
    let forward = stdout_of(&["sigma", "wm ⊗ wp"]);
    let back = stdout_of(&["sigma", "--inverse", &forward]);
    assert_eq!(back, "wm⊗wp");
}

#[test]
fn parse_errors_carry_position_and_fail() {
    let (_, stderr, code) = qhodge(&["normal-form", "c*a)"]);
    assert_ne!(code, 0);
    assert!(stderr.contains("at byte"), "diagnostic: {}", stderr);
    let (_, stderr, code) = qhodge(&["normal-form", "wm ∧ E"]);
    assert_ne!(code, 0);
    assert!(stderr.contains("'∧'"), "diagnostic: {}", stderr);
}

#[test]
fn verify_exit_codes() {
    let (stdout, _, code) = qhodge(&["verify", "--suite", "classical"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("suite classical: PASS"));
    assert!(stdout.contains("overall: PASS"));
    let (_, stderr, code) = qhodge(&["verify", "--suite", "nonsense"]);
    assert_ne!(code, 0);
    assert!(stderr.contains("unknown suite"));
}

#[test]
fn laplacian_json_shape() {
    let raw = stdout_of(&[
        "laplacian",
        "--q",
        "1/2",
        "--alpha",
        "1",
        "--gamma",
        "1",
        "--degree",
        "1",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&raw).expect("valid json");
    assert_eq!(v["q"], "1/2");
    assert_eq!(v["basis"].as_array().unwrap().len(), 5);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 5);
    assert_eq!(v["eigenvalues"]["kind"], "exact");
    let roots = v["eigenvalues"]["roots"].as_array().unwrap();
    let pinned: Vec<(String, u64)> = roots
        .iter()
        .map(|r| {
            assert_eq!(r["lo"], r["hi"], "rational eigenvalues pin exactly");
            (r["lo"].as_str().unwrap().to_string(), r["multiplicity"].as_u64().unwrap())
        })
        .collect();
    assert_eq!(
        pinned,
        vec![("0".to_string(), 1), ("5/64".to_string(), 2), ("2".to_string(), 2)]
    );
}

#[test]
fn hodge_symmetry_verdicts() {
    let on = stdout_of(&["hodge", "--alpha", "1", "--beta", "q^6", "--gamma", "1"]);
    assert!(on.contains("symmetric (T^2 scalar on 1-forms): true"), "{}", on);
    assert!(on.contains("real (operator entries real): true"), "{}", on);
    let off = stdout_of(&["hodge", "--alpha", "1", "--beta", "1", "--gamma", "1"]);
    assert!(off.contains("symmetric (T^2 scalar on 1-forms): false"), "{}", off);
    // Pinned q adds the normalisation block with the metric sign.
    let at = stdout_of(&[
        "hodge", "--alpha", "1", "--beta", "q^6", "--gamma", "-1", "--q", "1/2",
    ]);
    assert!(at.contains("T^2 on functions = 1"), "{}", at);
    assert!(at.contains("T^2 on 1-forms (first diagonal entry) = 7"), "{}", at);
}

#[test]
fn haar_uses_the_cache_when_configured() {
    let dir = std::env::temp_dir().join(format!("qhodge-it-cache-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_qhodge"))
            .args(["haar", "cs^2*c^2"])
            .env("QHODGE_CACHE_DIR", &dir)
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap().trim_end().to_string()
    };
    let first = run();
    assert_eq!(first, "1/(1 + q^2 + q^4)");
    let files = std::fs::read_dir(&dir).unwrap().count();
    assert_eq!(files, 1, "one cache entry written");
    let second = run();
    assert_eq!(first, second);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn act_matches_both_sides() {
    assert_eq!(stdout_of(&["act", "c", "--vector", "Xz"]), "c");
    assert_eq!(stdout_of(&["act", "c", "--vector", "Xp", "--side", "right"]), "a");
    // A scalar survives every vector action as epsilon(h) times itself.
    assert_eq!(stdout_of(&["act", "3", "--vector", "Xz"]), "0");
}

#[test]
fn grade_splits_charges() {
    let out = stdout_of(&["grade", "a*c + cs"]);
    assert!(out.contains("charge -2: a*c"), "{}", out);
    assert!(out.contains("charge 1: cs"), "{}", out);
}
