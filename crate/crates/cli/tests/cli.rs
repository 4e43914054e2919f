//! End-to-end behavior of the `lpp` binary: exit codes, output formats,
//! config round-trips, and the report summarizer.

use std::path::PathBuf;
use std::process::{Command, Output};

use lpp_cli::config::{DistSpec, ExperimentSpec, Family, MethodKind, OutputFormat};
use proptest::prelude::*;

fn lpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn missing_required_inputs_exit_2() {
    let out = lpp(&["tail", "--r", "2", "--n", "8", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lpp(&["tail", "--t", "0.5", "--r", "2", "--n", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lpp(&[
        "tail", "--t", "0.5", "--r", "2", "--n", "8", "--samples", "100", "--method", "sideways",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_exit_2() {
    let out = lpp(&["tail", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tail_run_emits_csv_rows() {
    let out = lpp(&[
        "tail", "--dist", "exp:1", "--t", "0.5", "--r", "2", "--n", "8", "--samples", "5000",
        "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("experiment,distribution,t,r,n,"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("tail,exp:1,0.5,2.0,8,5000,direct,"));
    assert_eq!(lines.next(), None);
}

#[test]
fn jsonl_format_is_line_delimited_objects() {
    let out = lpp(&[
        "uniform-walk",
        "--n-list",
        "2..6:2",
        "--format",
        "jsonl",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["experiment"], "uniform-walk");
    }
}

#[test]
fn uniform_walk_small_case_is_exact() {
    let out = lpp(&["uniform-walk", "--n", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(
        text.contains("0.16666666666666666"),
        "expected 1/6 in output, got: {text}"
    );
}

#[test]
fn corner_range_emits_one_row_per_scale() {
    let out = lpp(&[
        "corner", "--dist", "exp:1", "--n-list", "4..14:2", "--samples", "1000", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // header + 6 rows
    assert_eq!(stdout_of(&out).lines().count(), 7);
}

#[test]
fn verify_small_budget_exits_clean() {
    let out = lpp(&["verify", "--max-n", "4", "--fields", "20", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let log = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(log.contains("0 mismatches"), "log: {log}");
}

#[test]
fn emit_config_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = lpp(&[
        "tail",
        "--dist",
        "gamma:2:1",
        "--t",
        "0.5",
        "--r",
        "2.5",
        "--n",
        "6",
        "--samples",
        "2000",
        "--seed",
        "11",
        "--workers",
        "2",
        "--emit-config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let spec = ExperimentSpec::load(&cfg).unwrap();
    assert_eq!(spec.experiment, Family::Tail);
    assert_eq!(spec.distribution.shape, Some(2.0));
    assert_eq!(spec.samples, Some(2000));

    // run from the config alone, then with a flag override
    let base = lpp(&["tail", "--config", cfg.to_str().unwrap()]);
    assert_eq!(base.status.code(), Some(0));
    let row = stdout_of(&base).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("tail,gamma:2:1,0.5,2.5,6,2000,"));

    let overridden = lpp(&[
        "tail",
        "--config",
        cfg.to_str().unwrap(),
        "--samples",
        "500",
    ]);
    let row = stdout_of(&overridden).lines().nth(1).unwrap().to_string();
    assert!(row.contains(",500,"), "flags must win over config: {row}");

    // family mismatch is a validation error
    let wrong = lpp(&["corner", "--config", cfg.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn report_fits_the_rate_slope_with_target_annotation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("corner.csv");
    let out = lpp(&[
        "corner", "--dist", "exp:1", "--n-list", "4..10:2", "--samples", "30000", "--seed", "7",
        "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = lpp(&["report", "--in", csv.to_str().unwrap()]);
    assert_eq!(rep.status.code(), Some(0));
    let text = stdout_of(&rep);
    assert!(text.contains("slope of -log(p_hat) vs n"), "{text}");
    assert!(text.contains("0.613706"), "{text}");
}

#[test]
fn report_rejects_mixed_families() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    lpp(&["uniform-walk", "--n", "2", "--out", a.to_str().unwrap()]);
    lpp(&[
        "tail", "--t", "0.5", "--r", "2", "--n", "6", "--samples", "500", "--out",
        b.to_str().unwrap(),
    ]);
    let merged = dir.path().join("merged.csv");
    let mut text = std::fs::read_to_string(&a).unwrap();
    let second = std::fs::read_to_string(&b).unwrap();
    text.push_str(second.lines().nth(1).unwrap());
    text.push('\n');
    std::fs::write(&merged, text).unwrap();
    let rep = lpp(&["report", "--in", merged.to_str().unwrap()]);
    assert_eq!(rep.status.code(), Some(2));
}

#[test]
fn single_row_report_omits_the_slope() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one.csv");
    lpp(&[
        "tail", "--t", "0.5", "--r", "2", "--n", "6", "--samples", "500", "--out",
        csv.to_str().unwrap(),
    ]);
    let rep = lpp(&["report", "--in", csv.to_str().unwrap()]);
    let text = stdout_of(&rep);
    assert!(text.contains("slope fit: omitted"), "{text}");
}

#[test]
fn timing_flag_fills_the_wall_time_column() {
    let with = lpp(&[
        "tail", "--t", "0.5", "--r", "2", "--n", "6", "--samples", "500", "--timing",
    ]);
    let row = stdout_of(&with).lines().nth(1).unwrap().to_string();
    let wall_field = row.split(',').nth(14).unwrap();
    assert!(!wall_field.is_empty());
    let without = lpp(&["tail", "--t", "0.5", "--r", "2", "--n", "6", "--samples", "500"]);
    let row = stdout_of(&without).lines().nth(1).unwrap().to_string();
    assert!(row.split(',').nth(14).unwrap().is_empty());
}

fn spec_strategy() -> impl Strategy<Value = ExperimentSpec> {
    (
        prop_oneof![
            Just(Family::Tail),
            Just(Family::Corner),
            Just(Family::Shape),
            Just(Family::LeftTail),
            Just(Family::UniformWalk),
        ],
        prop_oneof![
            Just(DistSpec {
                kind: "exponential".into(),
                rate: Some(1.5),
                shape: None
            }),
            Just(DistSpec {
                kind: "gamma".into(),
                rate: Some(0.5),
                shape: Some(2.0)
            }),
        ],
        proptest::option::of(0.0f64..=0.5),
        proptest::option::of(0.5f64..4.0),
        proptest::option::of(1u64..1_000_000),
        proptest::option::of(prop_oneof![Just(MethodKind::Direct), Just(MethodKind::Tilted)]),
        any::<u64>(),
        0usize..32,
        proptest::option::of(-1.0f64..0.9),
        any::<bool>(),
    )
        .prop_map(
            |(experiment, distribution, t, r, samples, method, seed, workers, lambda, timing)| {
                ExperimentSpec {
                    experiment,
                    distribution,
                    t,
                    r,
                    eps: None,
                    n_list: Some("4..12:4".into()),
                    k: None,
                    samples,
                    budget: None,
                    max_n: None,
                    fields: None,
                    method,
                    lambda,
                    halfwidth: None,
                    mu0: None,
                    seed,
                    workers,
                    out: Some(PathBuf::from("rows.csv")),
                    format: OutputFormat::Csv,
                    timing,
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trip_for_valid_specs(spec in spec_strategy()) {
        let text = spec.emit();
        let back = ExperimentSpec::parse(&text).unwrap();
        prop_assert_eq!(spec, back);
    }
}
