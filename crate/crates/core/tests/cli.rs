use std::fs;
use std::process::Command;

use waterwave::io::{read_diagnostics, read_snapshot};

fn ww() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ww"))
}

#[test]
fn run_writes_outputs_under_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("wave.cfg");
    fs::write(
        &config,
        "grid.N = 32\ngrid.Nz = 17\nT_final = 0.3\ninitial.kind = standing_wave\ninitial.amplitude = 0.01\noutput_dir = ignored\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = ww().arg("run").arg(&config).env("WW_OUTPUT_DIR", &out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let table = read_diagnostics(&out.join("diagnostics.csv")).unwrap();
    assert!(table.records.len() >= 2);
    assert!(table.abort.is_none());
    let last = read_snapshot(&out.join("final.wwsn")).unwrap();
    assert!((last.t - 0.3).abs() < 1e-12);
    assert!(!dir.path().join("ignored").exists());

    let plot = ww().args(["plot-data"]).arg(out.join("diagnostics.csv")).arg("a_min").output().unwrap();
    assert!(plot.status.success());
    let text = fs::read_to_string(out.join("diagnostics_a_min.dat")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), table.records.len());

    let bad = ww().args(["plot-data"]).arg(out.join("diagnostics.csv")).arg("nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("valid fields"));
}

#[test]
fn depth_violation_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("deep.cfg");
    fs::write(&config, "grid.N = 16\ngrid.Nz = 9\nT_final = 1\nh0 = 1.5\ninitial.kind = standing_wave\ninitial.amplitude = 0.3\n").unwrap();
    let out = dir.path().join("out");
    let status = ww().arg("run").arg(&config).env("WW_OUTPUT_DIR", &out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(out.join("final.wwsn").exists());
}

#[test]
fn bad_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    fs::write(&config, "grid.N = 33\n").unwrap();
    let out = ww().arg("run").arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
