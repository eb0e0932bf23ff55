//! Golden tests: every corpus file must produce its annotated verdict
//! through the CLI, with byte-identical reports across runs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn claw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_claw"))
        .args(args)
        .output()
        .expect("claw binary runs")
}

fn manifest() -> Value {
    let src = std::fs::read_to_string(corpus_dir().join("manifest.json"))
        .expect("corpus manifest exists");
    serde_json::from_str(&src).expect("manifest parses")
}

fn corpus_file(name: &str) -> String {
    corpus_dir().join(name).to_string_lossy().into_owned()
}

fn report_of(stdout: &[u8]) -> Value {
    serde_json::from_slice(stdout).expect("CLI emits valid JSON")
}

#[test]
fn corpus_algebroids_classify_as_annotated() {
    for entry in manifest()["algebroids"].as_array().unwrap() {
        let file = corpus_file(entry["file"].as_str().unwrap());
        let is_lie = entry["is_lie"].as_bool().unwrap();
        let out = claw(&["check", &file, "--output", "json", "--trials", "6"]);
        let code = out.status.code().unwrap();
        assert_eq!(
            code,
            if is_lie { 0 } else { 1 },
            "exit code for {}: stderr {}",
            file,
            String::from_utf8_lossy(&out.stderr)
        );
        let report = report_of(&out.stdout);
        if let Some(label) = entry.get("classification").and_then(|v| v.as_str()) {
            let classification = &report["report"]["classification"];
            let got = match classification.as_str().unwrap() {
                "lie-algebroid" => match report["report"]["scalars"].as_str().unwrap() {
                    "complex" => "CLA".to_string(),
                    _ => "RLA".to_string(),
                },
                "almost" => "almost".to_string(),
                "skew-algebroid" => match report["report"]["scalars"].as_str().unwrap() {
                    "complex" => "complex skew-algebroid".to_string(),
                    _ => "skew-algebroid".to_string(),
                },
                other => other.to_string(),
            };
            assert_eq!(got, label, "classification of {}", file);
        }
    }
}

#[test]
fn corpus_bivectors_match_poisson_verdicts() {
    for entry in manifest()["bivectors"].as_array().unwrap() {
        let file = corpus_file(entry["file"].as_str().unwrap());
        let poisson = entry["poisson"].as_bool().unwrap();
        let out = claw(&["poisson", &file, "--output", "json", "--trials", "6"]);
        let code = out.status.code().unwrap();
        assert_eq!(
            code,
            if poisson { 0 } else { 1 },
            "exit code for {}: stderr {}",
            file,
            String::from_utf8_lossy(&out.stderr)
        );
        let report = report_of(&out.stdout);
        assert_eq!(
            report["report"]["poisson"]["is_complex_poisson"]
                .as_bool()
                .unwrap(),
            poisson,
            "verdict for {}",
            file
        );
    }
}

#[test]
fn corpus_matched_pairs() {
    for entry in manifest()["matched_pairs"].as_array().unwrap() {
        let first = corpus_file(entry["first"].as_str().unwrap());
        let second = corpus_file(entry["second"].as_str().unwrap());
        let matched = entry["matched"].as_bool().unwrap();
        let out = claw(&[
            "matched-pair",
            &first,
            &second,
            "--output",
            "json",
            "--trials",
            "6",
        ]);
        assert_eq!(
            out.status.code().unwrap(),
            if matched { 0 } else { 1 },
            "pair ({}, {}): stderr {}",
            first,
            second,
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn corpus_pullbacks() {
    for entry in manifest()["pullbacks"].as_array().unwrap() {
        let algebroid = corpus_file(entry["algebroid"].as_str().unwrap());
        let map = corpus_file(entry["map"].as_str().unwrap());
        let point = entry["point"].as_str().unwrap();
        let out = claw(&[
            "pullback", &algebroid, &map, "--point", point, "--output", "json",
        ]);
        assert_eq!(
            out.status.code().unwrap(),
            0,
            "pullback of {} along {}: stderr {}",
            algebroid,
            map,
            String::from_utf8_lossy(&out.stderr)
        );
        let report = report_of(&out.stdout);
        assert_eq!(
            report["report"]["fiber_dim"].as_u64().unwrap(),
            entry["fiber_dim"].as_u64().unwrap(),
            "fiber dim of {} along {}",
            algebroid,
            map
        );
        assert_eq!(
            report["report"]["transversal"].as_bool().unwrap(),
            entry["transversal"].as_bool().unwrap()
        );
        if let Some(class) = entry.get("class").and_then(|v| v.as_u64()) {
            assert_eq!(
                report["report"]["invariants"]["class"].as_u64().unwrap(),
                class,
                "class of pullback of {} along {}",
                algebroid,
                map
            );
        }
    }
}

#[test]
fn reports_are_byte_deterministic() {
    let cases: Vec<Vec<String>> = vec![
        vec![
            "check".into(),
            corpus_file("sl2c_bundle.json"),
            "--output".into(),
            "json".into(),
            "--seed".into(),
            "7".into(),
        ],
        vec![
            "scan".into(),
            corpus_file("vf_dx_ixdy.json"),
            "--output".into(),
            "json".into(),
        ],
        vec![
            "vf".into(),
            "dx + i*x*dy".into(),
            "--scan".into(),
            "x=-2..2:1,y=-2..2:1".into(),
            "--output".into(),
            "json".into(),
        ],
        vec![
            "poisson".into(),
            corpus_file("biv_mixed_not.json"),
            "--output".into(),
            "json".into(),
            "--trials".into(),
            "6".into(),
        ],
    ];
    for args in cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = claw(&argv);
        let second = claw(&argv);
        assert_eq!(
            first.stdout, second.stdout,
            "nondeterministic output for {:?}",
            args
        );
        assert_eq!(first.status.code(), second.status.code());
    }
}

#[test]
fn scan_reports_poles_and_strata() {
    let out = claw(&["scan", &corpus_file("vf_pole.json"), "--output", "json"]);
    assert_eq!(out.status.code().unwrap(), 0);
    let report = report_of(&out.stdout);
    let poles = report["report"]["pole_points"].as_array().unwrap();
    assert_eq!(poles.len(), 1);
    assert_eq!(poles[0].as_str().unwrap(), "(0)");

    // the strata split along the x = 0 line
    let out = claw(&["scan", &corpus_file("vf_dx_ixdy.json"), "--output", "json"]);
    let report = report_of(&out.stdout);
    assert_eq!(report["report"]["strata"].as_array().unwrap().len(), 2);
    assert!(!report["report"]["constant_real_rank_on_sample"]
        .as_bool()
        .unwrap());
}

#[test]
fn sum_and_decompose_round_trip_files() {
    let dir = std::env::temp_dir().join("claw-golden-roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let sum_path = dir.join("sum.json");
    let out = claw(&[
        "sum",
        &corpus_file("aff1_real.json"),
        &corpus_file("aff1_real.json"),
        "--out",
        sum_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code().unwrap(), 0);

    let re_path = dir.join("re.json");
    let im_path = dir.join("im.json");
    let out = claw(&[
        "decompose",
        sum_path.to_str().unwrap(),
        "--out-real",
        re_path.to_str().unwrap(),
        "--out-imag",
        im_path.to_str().unwrap(),
        "--trials",
        "6",
    ]);
    assert_eq!(out.status.code().unwrap(), 0);

    let original = std::fs::read_to_string(corpus_file("aff1_real.json")).unwrap();
    let re_part = std::fs::read_to_string(&re_path).unwrap();
    let a: Value = serde_json::from_str(&original).unwrap();
    let b: Value = serde_json::from_str(&re_part).unwrap();
    assert_eq!(a, b, "decomposed real part equals the original algebroid");
}

#[test]
fn input_errors_exit_2() {
    let out = claw(&["check", "/nonexistent/file.json"]);
    assert_eq!(out.status.code().unwrap(), 2);

    let dir = std::env::temp_dir().join("claw-golden-badinput");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"chart\": [\"x\"]}").unwrap();
    let out = claw(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code().unwrap(), 2);

    let out = claw(&["vf", "dx + dy"]);
    assert_eq!(
        out.status.code().unwrap(),
        2,
        "vf without chart is an input error"
    );
}

#[test]
fn poisson_algebroid_files_match_bivector_construction() {
    // The committed complex Poisson algebroid files are exactly what the
    // poisson construction produces from the paired bivector files.
    for (biv, alg) in [
        ("biv_const_cx.json", "poisson_cx_const.json"),
        ("biv_mixed_not.json", "poisson_cx_xw.json"),
    ] {
        let pi = claw::constructions::bivector_from_json(
            &std::fs::read_to_string(corpus_file(biv)).unwrap(),
        )
        .unwrap();
        let built = claw::constructions::poisson_algebroid(&pi).unwrap();
        let stored = claw::algebroid::ChartedAlgebroid::from_json(
            &std::fs::read_to_string(corpus_file(alg)).unwrap(),
        )
        .unwrap();
        assert_eq!(built, stored, "{} vs {}", biv, alg);
    }
}
