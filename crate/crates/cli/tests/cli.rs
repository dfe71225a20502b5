use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use supercoherent_cli::{parse_config, run_experiment, Cell, Experiment, Format};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supercoherent"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .unwrap()
}

fn argv(args: &[&str]) -> Vec<String> {
    std::iter::once("supercoherent")
        .chain(args.iter().copied())
        .map(String::from)
        .collect()
}

#[test]
fn spectrum_flags_parse() {
    let cfg = parse_config(argv(&["spectrum", "--n", "4", "--delta", "1.0"])).unwrap();
    assert_eq!(cfg.experiment, Experiment::Spectrum);
    assert_eq!(cfg.get_usize("n"), Some(4));
    assert_eq!(cfg.get_f64("delta"), Some(1.0));
    assert_eq!(cfg.format, Format::Csv);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = bin(&["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_number_is_usage_error() {
    assert_eq!(bin(&["spectrum", "--n", "four"]).status.code(), Some(2));
    assert_eq!(
        bin(&["fidelity", "--beta-list", "1,x"]).status.code(),
        Some(2)
    );
}

#[test]
fn flags_override_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"beta": 2, "g": 0.2}"#).unwrap();
    let cfg = parse_config(argv(&[
        "lindblad",
        "--config",
        path.to_str().unwrap(),
        "--beta",
        "4",
    ]))
    .unwrap();
    assert_eq!(cfg.get_f64("beta"), Some(4.0));
    assert_eq!(cfg.get_f64("g"), Some(0.2));

    // a flag for the list form replaces a scalar from the file
    let cfg = parse_config(argv(&[
        "lindblad",
        "--config",
        path.to_str().unwrap(),
        "--beta-list",
        "3,4",
    ]))
    .unwrap();
    assert_eq!(cfg.get_f64("beta"), None);
    assert_eq!(cfg.get_list("beta-list"), Some(vec![3.0, 4.0]));
}

#[test]
fn unknown_and_mistyped_keys_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"n": 4, "temperature": 1}"#).unwrap();
    let out = bin(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("temperature"));

    fs::write(&path, r#"{"n": "four"}"#).unwrap();
    let out = bin(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`n`"));
}

#[test]
fn spectrum_table_for_four_qubits() {
    let table = run_experiment(&parse_config(argv(&["spectrum", "--n", "4"])).unwrap()).unwrap();
    let rows: Vec<(String, f64, i64)> = table
        .rows
        .iter()
        .map(|r| match (&r[0], &r[1], &r[2]) {
            (Cell::Text(j), Cell::Float(e), Cell::Int(m)) => (j.clone(), *e, *m),
            other => panic!("unexpected row {other:?}"),
        })
        .collect();
    assert_eq!(
        rows,
        vec![
            ("0".into(), 0.0, 2),
            ("1".into(), 1.0, 9),
            ("2".into(), 3.0, 5)
        ]
    );
}

#[test]
fn paths_for_eight_qubit_singlets() {
    let table =
        run_experiment(&parse_config(argv(&["paths", "--n", "8", "--j", "0"])).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 14);
    let out = bin(&["paths", "--n", "8", "--j", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,J,multiplicity,path"));
    assert_eq!(text.lines().count(), 15);
}

#[test]
fn selection_report_is_json_and_passes() {
    let out = bin(&["selection", "--n", "4"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["columns", "meta", "rows"]);
    let rows = obj["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r[5] == Value::Bool(true)));
    assert_eq!(rows.last().unwrap()[0], "all");
    assert_eq!(obj["meta"]["config"]["n"], 4);
}

#[test]
fn verbose_json_carries_details() {
    let out = bin(&["spectrum", "--n", "3", "--format", "json", "--verbose"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["details"]["max_form_difference"], 0.0);
}

#[test]
fn out_path_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fid.csv");
    let out = bin(&["fidelity", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("beta,delta_opt_numeric,delta_opt_analytic,F_at_opt")
    );
    assert_eq!(text.lines().nth(2), Some("2,0.5,0.5,1.35914091422952"));

    let bad = dir.path().join("missing").join("x.csv");
    let out = bin(&["fidelity", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}

#[test]
fn invalid_physics_is_rejected_before_running() {
    assert_eq!(
        bin(&["lindblad", "--n", "5", "--beta", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(bin(&["lindblad"]).status.code(), Some(2));
    assert_eq!(
        bin(&["lindblad", "--beta", "1", "--state", "1,0,1,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bin(&["fidelity", "--beta-list", "-1"]).status.code(),
        Some(2)
    );
}

#[test]
fn unstable_step_is_numerical_failure() {
    let out = bin(&[
        "lindblad",
        "--beta",
        "1",
        "--g",
        "1",
        "--dt",
        "5",
        "--t-final",
        "500",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn source_date_epoch_sets_timestamp() {
    let out = Command::new(env!("CARGO_BIN_EXE_supercoherent"))
        .args(["spectrum", "--n", "2", "--format", "json"])
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["timestamp"], "1700000000");
    let v: Value =
        serde_json::from_slice(&bin(&["spectrum", "--n", "2", "--format", "json"]).stdout).unwrap();
    assert!(v["meta"]["timestamp"].is_null());
}
