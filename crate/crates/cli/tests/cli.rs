use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netsel(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_netsel"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "netsel {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    fs::write(
        &path,
        "preset = \"deterministic-grid\"\nusers = 6\nruns = 8\nschemes = [\"dns\", \"otso\", \"cellular-only\", \"wiffler\"]\n",
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_twice_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, workers) in [(&a, "1"), (&b, "3")] {
        netsel(&[
            "run",
            "--config",
            &config,
            "--seed",
            "11",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let (a, b) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 8 * 4);
    assert!(text.starts_with("scenario,run,seed,scheme,"));
}

#[test]
fn run_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let file = dir.path().join("r.jsonl");
    let stdout = netsel(&["run", "--config", &config, "--format", "jsonl"]).stdout;
    netsel(&[
        "run",
        "--config",
        &config,
        "--format",
        "jsonl",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(stdout, fs::read(file).unwrap());
    assert_eq!(String::from_utf8(stdout).unwrap().lines().count(), 32);
}

#[test]
fn seed_changes_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let a = netsel(&["run", "--config", &config, "--seed", "1"]).stdout;
    let b = netsel(&["run", "--config", &config, "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn sweep_writes_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("agg.csv");
    let results = dir.path().join("runs.csv");
    netsel(&[
        "sweep",
        "--config",
        &config,
        "--param",
        "c_switch",
        "--values",
        "0,400",
        "--out",
        out.to_str().unwrap(),
        "--results",
        results.to_str().unwrap(),
    ]);
    let agg = fs::read_to_string(out).unwrap();
    assert!(agg.starts_with("x,scheme,metric,mean,se,n\n"));
    assert!(agg.lines().any(|l| l.starts_with("0,dns,utility,")));
    assert!(agg.lines().any(|l| l.starts_with("400,wiffler,utility,")));
    assert_eq!(
        fs::read_to_string(results).unwrap().lines().count(),
        1 + 2 * 8 * 4
    );
}

#[test]
fn random_preset_runs() {
    let out = netsel(&["run", "--preset", "random-line", "--runs", "3"]).stdout;
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains(",random,0.5,")));
}

#[test]
fn verify_quick_passes() {
    let out = String::from_utf8(netsel(&["verify", "--quick"]).stdout).unwrap();
    assert_eq!(out.lines().count(), 6);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn demo_prints_both_users() {
    let out = String::from_utf8(netsel(&["demo"]).stdout).unwrap();
    assert!(out.contains("user 0: ((1,1),(2,3),(2,4))"));
    assert!(out.contains("converged: true"));
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "preset = \"deterministic-grid\"\nusers = 0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_netsel"))
        .args(["run", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 1"));
}
