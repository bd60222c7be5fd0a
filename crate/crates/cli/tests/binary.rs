//! Runs the built binary and checks exit codes and artifact determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = r#"
seed = 11

[model]
name = "euclidean"

[params]
rays_per_model = 8
table_rays = 2
gauge_rays = 6
transport_states = 6
gradient_states = 3
probe_s = [1e-1, 1e-2, 1e-3]
pestov_levels = [16, 32]
pestov_trend_eps = []
pestov_trend_n = 16
fiber_grid = [8, 8, 16]
fiber_random_forms = 1
"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gasgiant-tomo"));
    c.env_remove("GASGIANT_OUT_DIR");
    c
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn passing_suite_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    let o = run(&["probe"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("criterion,case,model,measured,relation,threshold,passed,detail"));
    assert!(summary.lines().skip(1).all(|l| l.contains(",true,")));
    assert!(out.join("probe.dat").exists());
}

#[test]
fn failing_threshold_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SMALL}\n[thresholds]\nprobe_rel = 1e-300\n"));
    let o = run(&["probe"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("nope.toml");
    assert_eq!(run(&["trace"], &missing, &out).status.code(), Some(2));
    let bad = write_config(tmp.path(), "[model]\nname = \"euclidean\"\nwat = 1\n");
    let o = run(&["trace"], &bad, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("wat"));
    let o = bin().args(["frobnicate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&["verify-all", "--parallel"], &cfg, &a);
    run(&["verify-all"], &cfg, &b);
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    assert!(sa.len() > 10);
    assert_eq!(sa.len(), sb.len());
    for ((na, da), (nb, db)) in sa.iter().zip(&sb) {
        assert_eq!(na, nb);
        assert!(da == db, "{na} differs between runs");
    }
}

#[test]
fn seed_flag_changes_sampled_rays() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&["transform"], &cfg, &a);
    run(&["transform", "--seed", "12"], &cfg, &b);
    assert_ne!(fs::read(a.join("gauge.csv")).unwrap(), fs::read(b.join("gauge.csv")).unwrap());
}

#[test]
fn env_out_dir_beats_config() {
    let tmp = tempfile::tempdir().unwrap();
    let from_cfg = tmp.path().join("cfg_out");
    let from_env = tmp.path().join("env_out");
    let text = format!("out_dir = {:?}\n{SMALL}", from_cfg.to_str().unwrap());
    let cfg = write_config(tmp.path(), &text);
    let o = bin().arg("probe").arg("--config").arg(&cfg).env("GASGIANT_OUT_DIR", &from_env).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(from_env.join("summary.csv").exists());
    assert!(!from_cfg.exists());
}

#[test]
fn three_dimensional_model_falls_back_for_surface_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SMALL.replace("\"euclidean\"", "\"torus3d\""));
    let out = tmp.path().join("out");
    let o = run(&["probe"], &cfg, &out);
    assert!(String::from_utf8_lossy(&o.stderr).contains("perturbed"));
    assert!(fs::read_to_string(out.join("summary.csv")).unwrap().contains(",perturbed,"));
}
