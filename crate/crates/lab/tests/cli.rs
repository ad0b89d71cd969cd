mod common;

use std::path::Path;
use std::process::Command;

use common::*;
use optpess_lab::cli::run;
use optpess_lab::{format_number, CSV_HEADER};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("optpess").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn config(dir: &Path, agents: &str, seeds: &str) -> String {
    let env = dir.join("env.json");
    let (code, _, err) = cli(&["gen-env", "boundary_tight", "3", env.to_str().unwrap(), "--states", "3", "--actions", "2", "--horizon", "3"]);
    assert_eq!(code, 0, "{err}");
    let path = dir.join("exp.toml");
    std::fs::write(
        &path,
        format!("environment = \"env.json\"\nagents = {agents}\nepisodes = 40\nseeds = {seeds}\n"),
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    names
}

#[test]
fn run_writes_one_csv_per_cell_plus_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[\"optpess_lp\", \"optpess_pd\"]", "[1, 2, 3]");
    let out = dir.path().join("out");
    let (code, stdout, err) = cli(&["run", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("6 runs"));
    let files = csv_files(&out);
    assert_eq!(files.len(), 7, "{files:?}");
    assert!(files.contains(&"summary.csv".to_string()));
    assert!(files.contains(&"optpess_pd_seed2.csv".to_string()));
    assert!(out.join("resolved_config.toml").exists());

    let text = std::fs::read_to_string(out.join("optpess_lp_seed1.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(
        CSV_HEADER.join(","),
        "episode,agent,seed,true_reward_value,true_cost_value,regret_cum,violation_regret,violated,lambda,epsilon_k,branch,lp_status"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 12);
    assert_eq!(&first[..3], &["1", "optpess_lp", "1"]);
    assert_eq!(first[8], "");
    assert_eq!(first[9], "");
    assert_eq!(first[10], "singleton");
    assert_eq!(text.lines().count(), 41);

    let pd = std::fs::read_to_string(out.join("optpess_pd_seed1.csv")).unwrap();
    let row: Vec<&str> = pd.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[8], "0");
    assert!(!row[9].is_empty());
    assert_eq!(row[10], "");

    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 6 + 2);
    assert!(summary.lines().any(|l| l.starts_with("optpess_pd,median,40,")));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[\"optpess_pd\", \"naive_optimistic\"]", "[5, 6]");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(cli(&["run", &cfg, "--output", a.to_str().unwrap()]).0, 0);
    assert_eq!(cli(&["run", &cfg, "--output", b.to_str().unwrap()]).0, 0);
    for name in csv_files(&a) {
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn fixed_optimal_has_zero_regret_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[\"fixed:optimal\"]", "[1]");
    let out = dir.path().join("out");
    assert_eq!(cli(&["run", &cfg, "--output", out.to_str().unwrap()]).0, 0);
    let text = std::fs::read_to_string(out.join("fixed-optimal_seed1.csv")).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[5], "0");
        assert_eq!(cols[1], "fixed:optimal");
    }
}

#[test]
fn solve_prints_mixture_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    mixture_env().write(&path).unwrap();
    let (code, out, _) = cli(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.lines().next().unwrap() == "value 0.5", "{out}");
    assert!(out.contains("cost 0.5"));
    assert!(out.contains("1 0 0 0.5") && out.contains("1 0 1 0.5"), "{out}");
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    mixture_env().write(&good).unwrap();
    let (code, out, _) = cli(&["validate", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("ok"));

    let mut env = mixture_env();
    env.transitions = vec![0.9, 1.0];
    env.reward = vec![1.5, 0.0];
    let bad = dir.path().join("bad.json");
    env.write(&bad).unwrap();
    let (code, _, err) = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("sums to 0.9") && err.contains("outside [0,1]"), "{err}");

    let (code, _, err) = cli(&["validate", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("missing.json"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&[]).0, 1);
    assert_eq!(cli(&["frobnicate"]).0, 1);
    assert_eq!(cli(&["gen-env", "spiral", "1", "x.json"]).0, 1);
    assert_eq!(cli(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_optpess");
    assert_eq!(Command::new(exe).output().unwrap().status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{}").unwrap();
    let out = Command::new(exe).args(["validate", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn twelve_significant_digits() {
    assert_eq!(format_number(0.5), "0.5");
    assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
    assert_eq!(format_number(2.0 / 3.0 * 1e-7), "0.0000000666666666667");
    assert_eq!(format_number(-0.0), "0");
    assert_eq!(format_number(123456789.123456789), "123456789.123");
    let x = 0.123456789012345;
    let back: f64 = format_number(x).parse().unwrap();
    assert!((back - x).abs() <= 5e-12 * x);
}
