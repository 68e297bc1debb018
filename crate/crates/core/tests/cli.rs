//! End-to-end checks of the binary: output schemas, determinism, exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn telesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telesim"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_owned).collect::<Vec<_>>())
        .collect();
    (header, rows)
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("telesim-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn channel_combined_negativity_dies_near_the_printed_time() {
    let out = telesim(&[
        "channel", "--kind", "combined", "--gamma", "0.1", "--tmax", "10", "--dt", "0.05",
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(header, ["t", "negativity_numeric", "negativity_closed"]);
    assert_eq!(rows.len(), 201);
    let death_row = rows
        .iter()
        .find(|r| r[1].parse::<f64>().unwrap() <= 1e-9)
        .expect("negativity must reach zero");
    let t_death: f64 = death_row[0].parse().unwrap();
    assert!(
        (4.40..4.46).contains(&t_death),
        "first dead sample at t = {t_death}, expected just past 4.40687"
    );
    // Closed column dies at the same grid point.
    let closed: f64 = death_row[2].parse().unwrap();
    assert!(closed <= 1e-9);
}

#[test]
fn channel_ideal_is_a_single_unit_row() {
    let out = telesim(&["channel", "--kind", "ideal"]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "1.00000000");
}

#[test]
fn channel_dephasing_value_at_t_ten() {
    let out = telesim(&[
        "channel",
        "--kind",
        "dephasing",
        "--gamma",
        "0.1",
        "--tmax",
        "10",
        "--dt",
        "0.5",
    ]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout_of(&out));
    let last = rows.last().unwrap();
    assert_eq!(last[0], "10.0000000");
    let numeric: f64 = last[1].parse().unwrap();
    assert!((numeric - 0.135335).abs() < 1e-5);
}

#[test]
fn channel_output_is_deterministic() {
    let args = [
        "channel", "--kind", "bitflip", "--gamma", "0.07", "--tmax", "3", "--dt", "0.25",
    ];
    let a = stdout_of(&telesim(&args));
    let b = stdout_of(&telesim(&args));
    assert_eq!(a, b, "byte-for-byte determinism");
    assert!(a.ends_with('\n'));
}

#[test]
fn fidelity_intrinsic_matches_closed_column() {
    let out = telesim(&[
        "fidelity",
        "--channel",
        "ideal",
        "--alpha",
        "i",
        "--gamma",
        "0.1",
        "--omega0",
        "1",
        "--tmax",
        "10",
        "--dt",
        "0.5",
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(header, ["t", "fav_sim", "fav_closed", "abs_diff"]);
    for row in &rows {
        let diff: f64 = row[3].parse().unwrap();
        assert!(diff <= 1e-6, "row {row:?} exceeds the oracle tolerance");
    }
}

#[test]
fn fidelity_bitflip_over_dephased_channel_matches_closed_column() {
    let out = telesim(&[
        "fidelity",
        "--channel",
        "dephasing",
        "--t0",
        "10",
        "--alpha",
        "b",
        "--gamma",
        "0.1",
        "--omega0",
        "1",
        "--tmax",
        "8",
        "--dt",
        "0.5",
    ]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout_of(&out));
    for row in &rows {
        let diff: f64 = row[3].parse().unwrap();
        assert!(diff <= 1e-6);
    }
}

#[test]
fn fidelity_perfect_ideal_row_is_one_and_combined_lacks_closed_forms_nowhere() {
    let out = telesim(&[
        "fidelity",
        "--channel",
        "ideal",
        "--alpha",
        "p",
        "--tmax",
        "1",
        "--dt",
        "0.5",
    ]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(rows[0][1], "1.00000000");
    assert_eq!(rows[0][2], "1.00000000");
}

#[test]
fn fidelity_closed_column_empty_when_no_formula_exists() {
    // Bit-flip channel with noisy recovery has no printed formula.
    let out = telesim(&[
        "fidelity",
        "--channel",
        "bitflip",
        "--alpha",
        "d",
        "--t0",
        "2",
        "--tmax",
        "1",
        "--dt",
        "0.5",
    ]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout_of(&out));
    for row in &rows {
        assert_eq!(row.len(), 4);
        assert!(row[2].is_empty() && row[3].is_empty(), "row {row:?}");
        let sim: f64 = row[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&sim));
    }
}

#[test]
fn critical_omega_intrinsic_reproduces_the_spot_value() {
    let out = telesim(&[
        "critical-omega",
        "--alpha",
        "i",
        "--gamma",
        "0.1",
        "--t0",
        "10",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let omega_c = v["omega_c"].as_f64().unwrap();
    assert!((omega_c - 1.09915).abs() < 1e-3, "omega_c = {omega_c}");
    assert!(v["iterations"].as_u64().unwrap() > 10);
    let phi = v["phi_max_at_omega_c"].as_f64().unwrap();
    assert!((phi - 2.0 / 3.0).abs() < 1e-4);
}

#[test]
fn critical_omega_without_bracket_exits_three() {
    let out = telesim(&[
        "critical-omega",
        "--alpha",
        "d",
        "--gamma",
        "0",
        "--t0",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_path_exits_two() {
    let out = telesim(&[
        "channel",
        "--kind",
        "ideal",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn esd_channel_mode_reports_death_and_closed_form() {
    let out = telesim(&[
        "esd", "--mode", "channel", "--kind", "combined", "--gamma", "0.1", "--tmax", "10",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let death = v["death_time"].as_f64().unwrap();
    let closed = v["closed_form"].as_f64().unwrap();
    assert!((death - closed).abs() < 1e-3);
    assert!((closed - 4.40687).abs() < 1e-5);
}

#[test]
fn esd_channel_mode_reports_none_for_dephasing() {
    let out = telesim(&[
        "esd",
        "--mode",
        "channel",
        "--kind",
        "dephasing",
        "--gamma",
        "0.1",
        "--tmax",
        "20",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(v["death_time"].is_null());
}

#[test]
fn config_file_merges_under_flags() {
    let cfg_path = tmp_path("config.json");
    std::fs::write(
        &cfg_path,
        r#"{"kind": "dephasing", "gamma": 0.1, "tmax": 1.0, "dt": 0.5}"#,
    )
    .unwrap();
    let out = telesim(&[
        "channel",
        "--config",
        cfg_path.to_str().unwrap(),
        "--tmax",
        "2.0",
    ]);
    std::fs::remove_file(&cfg_path).ok();
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout_of(&out));
    // dt 0.5 from the file, tmax 2.0 from the flag.
    assert_eq!(rows.len(), 5);
    assert_eq!(rows.last().unwrap()[0], "2.00000000");
}

#[test]
fn tables_command_emits_both_csv_files() {
    let dir = tmp_path("tables");
    let out = telesim(&["tables", "--outdir", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let t1 = std::fs::read_to_string(dir.join("table1.csv")).unwrap();
    let t2 = std::fs::read_to_string(dir.join("table2.csv")).unwrap();
    std::fs::remove_dir_all(&dir).ok();

    // The outcome-class field is quoted and contains commas; split each row
    // at the last two separators instead.
    let mut lines1 = t1.lines();
    assert_eq!(
        lines1.next().unwrap(),
        "outcome_class,tau_prime,tau_doubleprime"
    );
    let rows1: Vec<(String, f64, f64)> = lines1
        .map(|l| {
            let mut parts = l.rsplitn(3, ',');
            let td: f64 = parts.next().unwrap().parse().unwrap();
            let tp: f64 = parts.next().unwrap().parse().unwrap();
            (parts.next().unwrap().to_owned(), tp, td)
        })
        .collect();
    assert_eq!(rows1.len(), 6, "six outcome classes");
    assert!(rows1[0].0.contains("(3,3)"));
    // Excluded outcomes never appear.
    for excluded in ["(1,1)", "(1,2)", "(2,1)", "(2,2)"] {
        assert!(
            !t1.contains(excluded),
            "{excluded} must not appear in table 1"
        );
    }
    // The doubled class sits in the last row.
    let tau_33 = rows1[0].1;
    let tau_02 = rows1[5].1;
    assert!((tau_02 - 2.0 * tau_33).abs() < 1e-4);

    let (h2, rows2) = parse_csv(&t2);
    assert_eq!(h2, ["omega0", "tau_prime"]);
    assert_eq!(rows2.len(), 11);
    let w15: f64 = rows2[10][1].parse().unwrap();
    assert!((w15 - 4.19592).abs() < 5e-3, "omega0 = 1.5 row: {w15}");
}

#[test]
fn paper_check_with_broken_idle_rule_fails_the_doubling() {
    let json_path = tmp_path("report.json");
    let out = telesim(&[
        "paper-check",
        "--defect",
        "idle-noise",
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("criterion 7: FAIL"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    std::fs::remove_file(&json_path).ok();
    assert_eq!(report["all_passed"], serde_json::Value::Bool(false));
    let criteria = report["criteria"].as_array().unwrap();
    let c7 = criteria.iter().find(|c| c["id"] == 7).unwrap();
    assert_eq!(c7["passed"], serde_json::Value::Bool(false));
    let failures: Vec<String> = c7["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap().to_owned())
        .collect();
    assert!(
        failures.iter().any(|f| f.contains("doubling")),
        "doubling check must fail under the broken idle rule: {failures:?}"
    );
}

#[test]
fn unknown_defect_exits_three() {
    let out = telesim(&["paper-check", "--defect", "bogus"]);
    assert_eq!(out.status.code(), Some(3));
}
