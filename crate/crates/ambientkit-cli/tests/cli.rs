//! End-to-end tests of the command-line interface: exit codes, document
//! layouts, determinism, and the round-trip through `family.json`.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ambientkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ambientkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("AMBIENTKIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn solve_writes_family_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &[
            "solve", "--family", "TRI", "--n", "5", "--k", "2", "--weights", "1/3,1/3,1/3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let envelope = stdout_json(&out);
    assert_eq!(envelope["verdict"], "pass");
    assert_eq!(envelope["results"]["dimension"], 3);

    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("family.json")).unwrap())
            .unwrap();
    assert_eq!(doc["family"], "TRI");
    assert_eq!(doc["generic"], true);
    assert_eq!(doc["basis"].as_array().unwrap().len(), 3);
    let first = &doc["basis"][0]["entries"][0];
    assert_eq!(first["alpha"].as_array().unwrap().len(), 5);
    assert!(first["value"].is_string());
}

#[test]
fn even_dimension_hypothesis_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &[
            "solve", "--family", "TRI", "--n", "4", "--k", "3", "--weights", "1/3,1/3,1/3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decimal_weights_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &[
            "solve", "--family", "TRI", "--n", "5", "--k", "1", "--weights", "0.5,1,1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_complex_passes_at_any_weights() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &[
            "verify-complex", "--family", "TRI", "--n", "5", "--k", "3", "--weights",
            "1/2,1/2,1/2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    for junction in report["results"]["junctions"].as_array().unwrap() {
        assert_eq!(junction["zero"], true);
    }
}

#[test]
fn reports_are_byte_stable_modulo_timings() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "exactness", "--family", "TRI", "--n", "5", "--k", "2", "--weights", "1/3,1/3,1/3",
    ];
    let mut docs = Vec::new();
    for _ in 0..2 {
        let out = ambientkit(&args, dir.path());
        assert_eq!(out.status.code(), Some(0));
        let mut v = stdout_json(&out);
        v.as_object_mut().unwrap().remove("timings_ms");
        docs.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(docs[0], docs[1]);
}

#[test]
fn csv_of_order_zero_family_is_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &[
            "solve", "--family", "TRI", "--n", "5", "--k", "0", "--weights", "1,1,1",
            "--format", "csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("family.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "member,alpha,value");
}

#[test]
fn family_document_round_trips_with_identical_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &[
            "solve", "--family", "OR_INNER2", "--n", "7", "--k", "2", "--l", "0", "--weights",
            "1/3,2/5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("family.json")).unwrap())
            .unwrap();
    let basis = ambientkit_core::solver::family_basis_from_json(&doc).unwrap();
    assert!(basis.dimension() >= 3); // k - l + 1
    for m in &basis.members {
        assert!(m.is_in_kernel().unwrap());
        assert!(ambientkit_core::solver::verify_recurrences(m).unwrap().all_zero);
    }
    // re-serialization is bit-identical
    let again = ambientkit_core::solver::family_basis_to_json(&basis);
    assert_eq!(
        serde_json::to_string(&doc).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}

#[test]
fn fsa_flag_runs_the_symmetry_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &["solve", "--family", "TRI", "--n", "7", "--k", "2", "--fsa"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let envelope = stdout_json(&out);
    assert_eq!(envelope["results"]["symmetry"]["applicable"], true);
    for member in envelope["results"]["symmetry"]["members"].as_array().unwrap() {
        assert_eq!(member["swap_inner"], true);
        assert_eq!(member["swap_outer"], true);
        assert_eq!(member["involution"], true);
    }
    // weights echoed as exact rationals
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("family.json")).unwrap())
            .unwrap();
    assert_eq!(doc["weights"][0], "-3/4");
}

#[test]
fn verify_symmetry_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &["verify-symmetry", "--family", "TRI", "--n", "9", "--k", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    // boundary n = 2k is a config error
    let out = ambientkit(
        &["verify-symmetry", "--family", "TRI", "--n", "6", "--k", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_or_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(&["verify-or", "--n", "9", "--k", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["extreme_value"], "1");
    assert_eq!(report["results"]["fsa_recurrences_zero"], true);
    // outside the closed form's domain
    let out = ambientkit(&["verify-or", "--n", "5", "--k", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &[
            "oracle-commutator", "--n", "2", "--k", "2", "--seed", "7", "--trials", "10",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["seed"], 7);

    let out = ambientkit(
        &[
            "oracle-tangential", "--family", "TRI", "--n", "3", "--k", "1", "--weights",
            "2,2,2", "--seed", "11", "--trials", "5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "pass");

    // fractional weights cannot drive the polynomial oracle
    let out = ambientkit(
        &[
            "oracle-tangential", "--family", "TRI", "--n", "3", "--k", "1", "--weights",
            "1/2,2,2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ambientkit"))
        .args(["oracle-commutator", "--n", "1", "--k", "1", "--trials", "3"])
        .current_dir(dir.path())
        .env("AMBIENTKIT_SEED", "12345")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["seed"], 12345);
}

#[test]
fn dims_command_reports_cardinalities() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(&["dims", "--family", "TRI", "--n", "5", "--k", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["euler_characteristic"], 3);
    let spaces = report["results"]["chain_spaces"].as_array().unwrap();
    assert_eq!(spaces[0]["cardinality"], 15);
    assert_eq!(spaces[1]["cardinality"], 5);
}

#[test]
fn report_subset_runs_fast_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &["report", "--only", "3,7", "--seed", "1", "--out", "report.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(doc["results"]["passed"], true);
    let criteria = doc["results"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 2);
    assert_eq!(criteria[0]["id"], 3);
    assert_eq!(criteria[1]["id"], 7);
}

#[test]
fn exactness_warns_at_nongeneric_weights() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambientkit(
        &[
            "exactness", "--family", "TRI", "--n", "5", "--k", "2", "--weights", "0,0,0",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["generic"], false);
    assert!(!report["warnings"].as_array().unwrap().is_empty());
    assert!(report["results"]["dim_ker_d1"].as_u64().unwrap() >= 3);
}
