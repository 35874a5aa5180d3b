//! End-to-end runs of the `kkent` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kkent::output::{read_json, read_sweep_csv, JsonDocument, EXTRAPOLATION_COLUMNS};
use kkent::SweepRow;
use kkent_core::{evaluate_point, ModelParams, SiteCap};

fn kkent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kkent")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SWEEP: &str = r#"
mode = "sweep"
cut = "diagonal"
lo = -1
hi = 1
points = 3
k_coupling = -1
temperatures = [0.05, 0.5]
n_sites_list = [2, 3]
"#;

#[test]
fn point_prints_the_library_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.toml",
        "mode = \"point\"\nn_sites = 3\nj_spin = 1\ni_pseudo = 0.5\nk_coupling = -1\ntemperature = 0.1\n",
    );
    let out = kkent(&["point", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let printed: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    let p = ModelParams::new(3).with_couplings(1.0, 0.5, -1.0);
    let expected = evaluate_point(&p, &[0.1], false, SiteCap::default())
        .unwrap()
        .temperatures[0]
        .negativity
        .log_negativity;
    assert_eq!(printed, expected);
    assert!(printed > 0.0);
}

#[test]
fn config_errors_exit_with_code_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "mode = \"point\"\nn_sites = 2\njj_spin = 1\nk_coupling = -1\ntemperature = 0.1\n",
    );
    let out = kkent(&["point", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("jj_spin"));

    let sweep = write(dir.path(), "s.toml", SWEEP);
    let out = kkent(&["point", "--config", &sweep]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mode"));

    let out = kkent(&["sweep", "--config", &sweep, "--workers", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_files_exit_with_the_io_code() {
    let out = kkent(&["point", "--config", "/nonexistent/kkent.toml"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sweep_csv_is_appended_and_extrapolated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SWEEP);
    let csv = dir.path().join("rows.csv");
    let csv_arg = csv.to_str().unwrap();
    for _ in 0..2 {
        let out = kkent(&["sweep", "--config", &cfg, "--output", csv_arg, "--workers", "2"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.matches("n_sites,").count(), 1);
    let rows = read_sweep_csv(&csv).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 3 * 2);
    assert!(rows.iter().all(SweepRow::is_ok));

    // Appending with a different column set is refused.
    let out = kkent(&["sweep", "--config", &cfg, "--output", csv_arg, "--observables"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(fs::read_to_string(&csv).unwrap(), text);

    let ext = write(
        dir.path(),
        "e.toml",
        &format!("mode = \"extrapolate\"\ninput = {csv_arg:?}\n"),
    );
    let out = kkent(&["extrapolate", "--config", &ext]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), EXTRAPOLATION_COLUMNS.join(","));
    // Three couplings times two temperatures, each fitted over N = 2 and 3.
    assert_eq!(lines.count(), 6);
}

#[test]
fn sweep_json_carries_metadata_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SWEEP);
    let json = dir.path().join("rows.json");
    let out = kkent(&[
        "sweep",
        "--config",
        &cfg,
        "--output",
        json.to_str().unwrap(),
        "--format",
        "json",
        "--observables",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: JsonDocument<SweepRow> = read_json(&json).unwrap();
    assert_eq!(doc.rows.len(), 12);
    assert_eq!(doc.metadata.spec["mode"], "sweep");
    assert_eq!(doc.metadata.spec["observables"], true);
    assert_eq!(doc.metadata.tool_version, env!("CARGO_PKG_VERSION"));
    assert!(doc.rows.iter().all(|r| r.ss_bond_mean.is_some()));
}

#[test]
fn stdout_sweep_matches_the_written_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SWEEP);
    let csv = dir.path().join("rows.csv");
    let to_stdout = kkent(&["sweep", "--config", &cfg]);
    let to_file = kkent(&["sweep", "--config", &cfg, "--output", csv.to_str().unwrap()]);
    assert_eq!(to_stdout.status.code(), Some(0));
    assert_eq!(to_file.status.code(), Some(0));
    let a = String::from_utf8(to_stdout.stdout).unwrap();
    let b = fs::read_to_string(&csv).unwrap();
    assert_eq!(a.lines().count(), b.lines().count());
    assert_eq!(a.lines().next(), b.lines().next());
}

#[test]
fn cache_directory_is_populated_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SWEEP);
    let cache = dir.path().join("cache");
    let run = || {
        let out = kkent(&["sweep", "--config", &cfg, "--cache", cache.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run();
    let files = fs::read_dir(&cache).unwrap().count();
    assert_eq!(files, 6);
    let second = run();
    let ln_column =
        |text: &str| -> Vec<String> { text.lines().map(|l| l.split(',').nth(9).unwrap().to_string()).collect() };
    assert_eq!(ln_column(&first), ln_column(&second));
}

#[test]
fn max_sites_flag_reports_memory_and_lifts_the_cap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.toml",
        "mode = \"point\"\nn_sites = 2\nk_coupling = 1\ntemperature = 0.1\n",
    );
    let out = kkent(&["point", "--config", &cfg, "--max-sites", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("MiB"));
    let out = kkent(&["point", "--config", &cfg, "--max-sites", "99"]);
    assert_eq!(out.status.code(), Some(2));
}
