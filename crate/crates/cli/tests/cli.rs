use std::path::Path;
use std::process::{Command, Output};

fn tfqkd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfqkd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("session.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn run_writes_csv_to_stdout_and_report_to_stderr() {
    let o = tfqkd(&["run", "--rounds", "20000", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("sweep_parameter,sweep_value,master_seed,"));
    assert_eq!(out.lines().count(), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("security"));
    assert!(err.contains("approximate comparison"));
}

#[test]
fn run_is_reproducible_across_workers() {
    let a = tfqkd(&["run", "--rounds", "50000", "--seed", "9", "--workers", "1"]);
    let b = tfqkd(&["run", "--rounds", "50000", "--seed", "9", "--workers", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n_rounds = 30000\nmaster_seed = 3\n\n[params]\nsource_mode = \"uniform_in_bin\"\n\n[attack]\nkind = \"frequency_intercept\"\n",
    );
    let out = dir.path().join("stats.csv");
    let o = tfqkd(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&o);
    assert!(report.contains("MISMATCH"), "{report}");
    let csv = std::fs::read_to_string(&out).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(
        row.contains(",frequency_intercept,uniform_in_bin,"),
        "{row}"
    );
    assert!(row.contains(",30000,"));

    let strict = tfqkd(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn strict_passes_on_matching_session() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[params]\nsource_mode = \"uniform_in_bin\"\n");
    let o = tfqkd(&["run", "--config", &cfg, "--rounds", "200000", "--strict"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn configuration_errors_exit_1() {
    assert_eq!(tfqkd(&["run", "--rounds", "0"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[params]\nbuffer_fraction = 1.5\n");
    let o = tfqkd(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr)
        .unwrap()
        .contains("params.buffer_fraction"));
    let missing = dir.path().join("nope.toml");
    let o = tfqkd(&["check", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = tfqkd(&["sweep", "--param", "s_t"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_rows_follow_values() {
    let o = tfqkd(&[
        "sweep", "--param", "s", "--values", "5,2,3", "--rounds", "20000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let values: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(values, ["2.00000000e0", "3.00000000e0", "5.00000000e0"]);
}

#[test]
fn analytic_table() {
    let o = tfqkd(&["analytic", "--s", "3,10"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(
        rows[0],
        "s,pe_unbuffered,p_r,p_b,p_w,pe_buffered,efficiency"
    );
    assert!(rows[1].starts_with("3.00000000e0,1.88062076e-1,6.29622187e-1,3.64631473e-1,"));
    assert!(rows[2].starts_with("1.00000000e1,5.64189584e-2,"));
    assert_eq!(tfqkd(&["analytic", "--s", "0"]).status.code(), Some(1));
}

#[test]
fn distinguish_and_resolution_error() {
    let o = tfqkd(&["distinguish", "--ratios", "0.1,0.3", "--points", "401"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("1.00000000e-1,3.1885"));
    let o = tfqkd(&["distinguish", "--ratios", "0.01", "--points", "801"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_reports_and_strict_flags_insecure_bins() {
    let o = tfqkd(&["check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("resolution delta_t*delta_w"));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[params]\nbin_t = 2000.0\n");
    let o = tfqkd(&["check", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let o = tfqkd(&["check", "--config", &cfg, "--strict"]);
    assert_eq!(o.status.code(), Some(2));
}
