//! End-to-end tests of the binary: spawn it, parse what it prints, check
//! exit codes against the documented meanings (2 config, 3 math
//! precondition, 4 guardrail).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schottky"))
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout should be one JSON document")
}

fn run_ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().expect("no exit code")
}

fn write_group(name: &str, body: &str) -> PathBuf {
    let path = tmp(name);
    std::fs::write(&path, body).unwrap();
    path
}

const RANK_ONE: &str =
    r#"{"generators":[{"t_plus":[1.0,0.0],"t_minus":[-1.0,0.0],"s":[0.004,0.0]}]}"#;

#[test]
fn tate_series_heads() {
    let doc = run_json(&["tate-series", "--order", "2"]);
    assert_eq!(doc["schema"], "1");
    assert_eq!(
        doc["results"]["a4"]["terms"],
        serde_json::json!([[1, "-5/1"], [2, "-45/1"]])
    );
    assert_eq!(
        doc["results"]["a6"]["terms"],
        serde_json::json!([[1, "-1/1"], [2, "-23/1"]])
    );
    assert_eq!(doc["metadata"]["integral"], true);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["identities", "--n-max", "50", "--p-max", "100"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
    for check in doc["results"]["checks"].as_array().unwrap() {
        assert_eq!(check["pass"], true, "failed check: {check}");
    }
}

#[test]
fn rank_one_periods_and_certificate() {
    let group = write_group("rank_one.json", RANK_ONE);
    let group = group.to_str().unwrap();

    let doc = run_json(&["periods-numeric", "--group", group, "--n", "3"]);
    let p11 = &doc["results"]["p"][0][0];
    assert!((p11[0].as_f64().unwrap() - 0.004).abs() < 1e-15);
    assert!(p11[1].as_f64().unwrap().abs() < 1e-15);
    assert_eq!(doc["metadata"]["certified"], true);
    assert_eq!(doc["metadata"]["n"], 3);

    let cert = run_json(&["convergence-cert", "--group", group]);
    assert_eq!(cert["results"]["certified"], true);
    assert!(cert["results"]["sum_l"].as_f64().unwrap() < 1.0);
}

#[test]
fn limit_set_emits_csv() {
    let group = write_group("csv_group.json", RANK_ONE);
    let out = run(&["limit-set", "--group", group.to_str().unwrap(), "--depth", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "re,im");
    assert!(lines.len() > 2);
    for line in &lines[1..] {
        let (re, im) = line.split_once(',').unwrap();
        re.parse::<f64>().unwrap();
        im.parse::<f64>().unwrap();
    }
}

#[test]
fn exit_codes_are_stable() {
    // 2: unreadable configuration
    assert_eq!(
        exit_code(&["periods-numeric", "--group", "/nonexistent/g.json"]),
        2
    );
    let bad = write_group("bad.json", "{not json");
    assert_eq!(exit_code(&["periods-numeric", "--group", bad.to_str().unwrap()]), 2);

    // 3: geometric precondition (coincident fixed points)
    let singular = write_group(
        "singular.json",
        r#"{"generators":[{"t_plus":[1.0,0.0],"t_minus":[1.0,0.0],"s":[0.01,0.0]}]}"#,
    );
    assert_eq!(
        exit_code(&["periods-numeric", "--group", singular.to_str().unwrap()]),
        3
    );

    // 4: resource guardrail
    assert_eq!(exit_code(&["schottky-j", "--max-trace", "3"]), 4);

    // 2: clap usage error
    assert_eq!(exit_code(&["tate-series", "--no-such-flag"]), 2);

    // 2: evaluated mode without points, and with a wrong point count
    assert_eq!(
        exit_code(&["periods-universal", "--g", "2", "--mode", "evaluated"]),
        2
    );
    assert_eq!(
        exit_code(&[
            "periods-universal",
            "--g",
            "2",
            "--mode",
            "evaluated",
            "--points",
            "1,2,3",
        ]),
        2
    );
}

#[test]
fn theta_product_feeds_the_substitution_commands() {
    let form = tmp("theta3.json");
    let form = form.to_str().unwrap();
    run_ok(&["theta-product", "--g", "3", "--max-trace", "6", "--out", form]);
    // --out leaves stdout empty, so reload the document from disk
    let saved: Value =
        serde_json::from_str(&std::fs::read_to_string(form).unwrap()).unwrap();
    assert_eq!(saved["results"]["expansion"]["g"], 3);
    let n_terms = saved["results"]["expansion"]["terms"].as_array().unwrap().len();
    assert!(n_terms > 0);

    // every term has trace 6 > 1, so the degree-1 substitution is zero
    let check = run_json(&[
        "schottky-check",
        "--form",
        form,
        "--hyperelliptic",
        "--degree",
        "1",
        "--points",
        "3",
    ]);
    assert_eq!(check["results"]["all_zero"], true);
    assert_eq!(
        check["metadata"]["terms_above_degree"].as_u64().unwrap(),
        n_terms as u64
    );

    // the minimal layer vanishes at explicit hyperelliptic points, and
    // identically as a rational function on the locus
    let lt = run_json(&[
        "lowest-term",
        "--form",
        form,
        "--layer",
        "2,2,2",
        "--mode",
        "evaluated",
        "--hyperelliptic",
        "--points",
        "1,2,4;1,3,9",
    ]);
    assert_eq!(lt["results"]["all_zero"], true);
}

#[test]
fn lowest_term_symbolic_on_a_hand_written_form() {
    // c^2 - c^{-2} at the (1,1) layer: nonzero as a rational function
    let form = tmp("toy_form.json");
    std::fs::write(
        &form,
        r#"{"g": 2, "max_trace": 2, "terms": [
            {"T": [[1, 2], [2, 1]], "a": "1/1"},
            {"T": [[1, -2], [-2, 1]], "a": "-1/1"}
        ]}"#,
    )
    .unwrap();
    let doc = run_json(&[
        "lowest-term",
        "--form",
        form.to_str().unwrap(),
        "--layer",
        "1,1",
        "--mode",
        "symbolic",
        "--hyperelliptic",
    ]);
    assert_eq!(doc["results"]["all_zero"], false);
    let value = doc["results"]["evaluations"][0]["value"].as_str().unwrap();
    assert!(!value.is_empty());
}

#[test]
fn boundary_restriction_slices_the_lattice_sum() {
    let saved = tmp("l8g2.json");
    let saved = saved.to_str().unwrap();
    run_ok(&[
        "lattice-theta",
        "--dim",
        "8",
        "--g",
        "2",
        "--max-trace",
        "2",
        "--out",
        saved,
    ]);
    let restricted = run_json(&["boundary-restrict", "--form", saved]);
    let direct = run_json(&["lattice-theta", "--dim", "8", "--g", "1", "--max-trace", "2"]);
    assert_eq!(
        restricted["results"]["expansion"]["terms"],
        direct["results"]["expansion"]["terms"]
    );
    assert_eq!(restricted["results"]["expansion"]["g"], 1);
}

#[test]
fn universal_table_shapes() {
    let doc = run_json(&["periods-universal", "--g", "2", "--degree", "1", "--mode", "symbolic"]);
    let entries = &doc["results"]["table"]["entries"];
    // p_11 = y_1 exactly at degree 1
    assert_eq!(entries[0][0]["terms"].as_array().unwrap().len(), 1);
    assert_eq!(entries[0][0]["terms"][0]["m"], serde_json::json!([1, 0]));
    // symmetric table
    assert_eq!(entries[0][1], entries[1][0]);

    let eval = run_json(&[
        "periods-universal",
        "--g",
        "2",
        "--degree",
        "1",
        "--mode",
        "evaluated",
        "--points",
        "1,-1,2,-2",
    ]);
    assert_eq!(
        eval["results"]["table"]["entries"][0][0]["terms"][0]["c"],
        "1/1"
    );
}
