use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fockport"));
    c.env_remove("FOCKPORT_SEED");
    c
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fockport-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Fields of a CSV line whose first field may be quoted.
fn fields(line: &str) -> Vec<&str> {
    let (first, rest) = match line.strip_prefix('"') {
        Some(tail) => {
            let (q, rest) = tail.split_once("\",").unwrap();
            (q, rest)
        }
        None => line.split_once(',').unwrap(),
    };
    std::iter::once(first).chain(rest.split(',')).collect()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

const CONFIG: &str = "resource = su2:xi=0.5,theta=0|pi\nresource = maxent\nN = 1,2\nnu = 3..=5\nsamples = 200\n";

fn write_config() -> PathBuf {
    let path = tmp("sweep.cfg");
    std::fs::write(&path, CONFIG).unwrap();
    path
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let cfg = write_config();
    let run = |threads: &str| stdout(&bin().args(["sweep", "--config"]).arg(&cfg).env("RAYON_NUM_THREADS", threads).output().unwrap());
    let a = run("1");
    assert_eq!(a, run("3"));
    assert_eq!(a.lines().count(), 1 + 3 * 2 * 3);
    assert!(a.starts_with("resource,N,nu,m,f_closed,f_mc,"));
}

#[test]
fn seed_flag_and_environment_agree() {
    let cfg = write_config();
    let flag = stdout(&bin().args(["--seed", "42", "sweep", "--config"]).arg(&cfg).output().unwrap());
    let env = stdout(&bin().args(["sweep", "--config"]).arg(&cfg).env("FOCKPORT_SEED", "42").output().unwrap());
    let default = stdout(&bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap());
    assert_eq!(flag, env);
    assert_ne!(flag, default);
}

#[test]
fn zero_samples_empties_monte_carlo_columns() {
    let cfg = write_config();
    let text = stdout(&bin().args(["sweep", "--samples", "0", "--config"]).arg(&cfg).output().unwrap());
    for line in text.lines().skip(1) {
        let cols = fields(line);
        assert_eq!(cols.len(), 12);
        for i in [5, 6, 8, 9] {
            assert!(cols[i].is_empty(), "{line}");
        }
    }
}

#[test]
fn one_sample_is_rejected() {
    let cfg = write_config();
    let out = bin().args(["sweep", "--samples", "1", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn preset_fig8_is_monotone_in_modes() {
    let path = tmp("fig8.csv");
    let out = bin().args(["preset", "fig8", "--out"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(fields).collect();
    assert_eq!(rows.len(), 24);
    for nu in ["10", "100", "1000"] {
        let f: Vec<f64> = rows.iter().filter(|r| r[2] == nu).map(|r| r[4].parse().unwrap()).collect();
        assert!(f.windows(2).all(|w| w[1] > w[0]), "nu={nu}");
    }
}

#[test]
fn unknown_preset_fails() {
    let out = bin().args(["preset", "fig9", "--out"]).arg(tmp("none.csv")).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig9"));
}

#[test]
fn bad_config_reports_line() {
    let path = tmp("bad.cfg");
    std::fs::write(&path, "resource = maxent\nN = 1\nnu = x\n").unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&path).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn report_lists_every_outcome() {
    let text = stdout(&bin().args(["report", "--resource", "maxent", "--N", "1", "--nu", "2", "--format", "csv"]).output().unwrap());
    let (summary, table) = text.split_once("\n\n").unwrap();
    let f: f64 = fields(summary.lines().nth(1).unwrap())[4].parse().unwrap();
    assert!((f - 8.0 / 9.0).abs() < 1e-14);
    let probs: Vec<f64> = table.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(probs.len(), 6);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let text = stdout(&bin().args(["report", "--resource", "bh:gamma=-0.5", "--N", "2", "--nu", "8"]).output().unwrap());
    assert!(text.contains("regime"));
}

#[test]
fn report_rejects_bad_descriptor() {
    let out = bin().args(["report", "--resource", "laser", "--N", "1", "--nu", "2"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn validate_runs_with_few_samples() {
    let out = bin().args(["validate", "--samples", "2000"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")).count() >= 12);
    assert!(text.contains("checks,"));
}
