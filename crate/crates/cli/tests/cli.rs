use std::path::Path;
use std::process::{Command, Output};

const BENCHMARK: &str = "\
[material]
K_S = 4.0e10
rho_S = 2.5e3
lambda_M = 1.2e10
mu_M = 1.0e10
phi = 0.2
kappa = 6.0e-13
T = 3
K_F = 2.5e9
rho_F = 1.04e3
nu = 1.0e-3
";

fn poro(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poro-ader"))
        .args(args)
        .env("PORO_OUTPUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("case.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn flops_table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = poro(&["flops"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# poro-ader "));
    assert!(lines[0].contains("config-sha256="));
    assert_eq!(lines[1], "N,unknowns,flops_lu,flops_stp,reduction,storage_lu_mb,storage_stp_mb");
    let row6: Vec<&str> = lines.iter().find(|l| l.starts_with("6,")).unwrap().split(',').collect();
    let reduction: f64 = row6[4].parse().unwrap();
    assert_eq!(format!("{reduction:.2}"), "24.76");
    assert_eq!(std::fs::read_to_string(dir.path().join("flops.csv")).unwrap(), text);
}

#[test]
fn oracle_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = poro(&["oracle", "--order", "3", "--trials", "100", "--seed", "7"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("seed 7"));
    let line = text.lines().find(|l| l.starts_with("max-deviation ")).unwrap();
    let value: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(value < 1e-10, "{line}");
}

#[test]
fn speeds_of_benchmark_material() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), BENCHMARK);
    let out = poro(&["--config", &cfg, "speeds"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let max = text.lines().find(|l| l.starts_with("max ")).unwrap();
    assert_eq!(max, "max 2715.6", "{text}");
}

#[test]
fn config_round_trips_through_dump() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), BENCHMARK);
    let first = poro(&["--config", &cfg, "dump-config"], dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let dumped = stdout(&first);
    assert!(dumped.contains("cfl_factor = 0.5"));
    let cfg2 = dir.path().join("dumped.cfg");
    std::fs::write(&cfg2, &dumped).unwrap();
    let second = poro(&["--config", cfg2.to_str().unwrap(), "dump-config"], dir.path());
    assert_eq!(stdout(&second), dumped);
}

#[test]
fn negative_porosity_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &BENCHMARK.replace("phi = 0.2", "phi = -0.2"));
    let out = poro(&["--config", &cfg, "speeds"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("phi") && err.contains("line 6"), "{err}");
}

#[test]
fn unknown_subcommand_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = poro(&["simulate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn missing_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = poro(&["--config", "/nonexistent/case.cfg", "flops"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_writes_conservation_log_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{BENCHMARK}\n[run]\norder = 2\nsubdivisions = 2\nt_end = 2e-5\n");
    let cfg = write_config(dir.path(), &text);
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let out = poro(&["--config", &cfg, "run", "--snapshot"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        snapshots.push(std::fs::read_to_string(dir.path().join("state.csv")).unwrap());
    }
    assert_eq!(snapshots[0], snapshots[1]);
    assert!(snapshots[0].lines().nth(1) == Some("element,quantity,mode,value"));
    let log = std::fs::read_to_string(dir.path().join("conservation.csv")).unwrap();
    let header = log.lines().nth(1).unwrap();
    assert!(header.starts_with("step,time,s_xx"));
    assert!(log.lines().count() >= 4);
}

#[test]
fn dump_operators_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = poro(&["dump-operators", "--degree", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("operators.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("matrix,row,col,value"));
    assert!(text.lines().any(|l| l.starts_with("stiffness_zeta,0,9,")));
    let bad = poro(&["dump-operators", "--degree", "9"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}
