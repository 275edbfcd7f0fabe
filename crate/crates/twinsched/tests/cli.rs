use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn twinsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinsched"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn oracle_is_deterministic_and_succeeds() {
    let a = twinsched(&["oracle", "--n-tasks", "5", "--seed", "42"]);
    assert!(a.status.success(), "stderr: {}", stderr(&a));
    let text = stdout(&a);
    assert!(text.contains("optimal order:"), "stdout: {text}");
    assert!(text.contains("total cost:"), "stdout: {text}");
    let b = twinsched(&["oracle", "--n-tasks", "5", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let c = twinsched(&["oracle", "--n-tasks", "5", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn oracle_rejects_infeasible_sizes() {
    let out = twinsched(&["oracle", "--n-tasks", "11", "--seed", "0"]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error"), "stderr: {}", stderr(&out));
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn run_writes_pinned_csv_formats_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let args = |out: &Path| {
        vec![
            "run".to_string(),
            "--algo".into(),
            "dteql".into(),
            "--n-tasks".into(),
            "3".into(),
            "--phi".into(),
            "2".into(),
            "--episodes".into(),
            "64".into(),
            "--instances".into(),
            "2".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    let run_a = Command::new(env!("CARGO_BIN_EXE_twinsched"))
        .args(args(&out_a))
        .output()
        .unwrap();
    assert!(run_a.status.success(), "stderr: {}", stderr(&run_a));
    assert!(stdout(&run_a).contains("dteql phi=2"));
    let summary = read(&out_a, "summary.csv");
    assert!(summary.starts_with(
        "algo,phi,delta,n_tasks,seeds,normalized_reward,miss_ratio,avg_delay,convergence_episodes\n"
    ));
    assert_eq!(summary.lines().count(), 2);
    for seed in ["7", "8"] {
        let trace = read(&out_a, &format!("trace_dteql_2_{seed}.csv"));
        assert!(
            trace.starts_with("episode,epsilon,total_cost,normalized_reward,misses,avg_delay\n")
        );
        assert!(trace.lines().count() > 2);
        assert!(trace.ends_with('\n'));
    }
    let run_b = Command::new(env!("CARGO_BIN_EXE_twinsched"))
        .args(args(&out_b))
        .output()
        .unwrap();
    assert!(run_b.status.success());
    for name in ["summary.csv", "trace_dteql_2_7.csv", "trace_dteql_2_8.csv"] {
        assert_eq!(
            fs::read(out_a.join(name)).unwrap(),
            fs::read(out_b.join(name)).unwrap(),
            "{name} differs between identical invocations"
        );
    }
}

#[test]
fn run_without_out_dir_fails_with_message() {
    let out = twinsched(&["run", "--algo", "ql", "--n-tasks", "3", "--episodes", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--out"), "stderr: {}", stderr(&out));
}

#[test]
fn run_rejects_unknown_algorithm() {
    let out = twinsched(&["run", "--algo", "sarsa"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("sarsa"), "stderr: {}", stderr(&out));
}

#[test]
fn run_beyond_oracle_limit_requires_no_normalize() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("big");
    let base = [
        "run",
        "--algo",
        "ql",
        "--n-tasks",
        "12",
        "--episodes",
        "8",
        "--instances",
        "1",
        "--seed",
        "0",
    ];
    let mut args = base.to_vec();
    let out_str = out_dir.display().to_string();
    args.extend(["--out", &out_str]);
    let refused = twinsched(&args);
    assert_eq!(refused.status.code(), Some(1));
    assert!(
        stderr(&refused).contains("--no-normalize"),
        "stderr: {}",
        stderr(&refused)
    );
    args.push("--no-normalize");
    let allowed = twinsched(&args);
    assert!(allowed.status.success(), "stderr: {}", stderr(&allowed));
    let summary = read(&out_dir, "summary.csv");
    let row = summary.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[5], "", "normalized_reward should be empty: {row}");
}

#[test]
fn config_file_applies_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let out_dir = dir.path().join("reports");
    fs::write(
        &cfg,
        format!(
            "# experiment\nalgo = ql\nn-tasks = 3\nepisodes = 32\ninstances = 1\nseed = 9\nout = {}\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let cfg_str = cfg.display().to_string();
    let out = twinsched(&["run", "--config", &cfg_str, "--episodes", "64"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let trace = read(&out_dir, "trace_ql_0_9.csv");
    let last = trace.lines().last().unwrap();
    assert!(
        last.starts_with("64,"),
        "CLI override of episodes should win, last line: {last}"
    );
}

#[test]
fn sweep_runs_the_grid_from_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    let out_dir = dir.path().join("grid");
    fs::write(
        &cfg,
        format!(
            "algos = ql, dteql\nphis = 2\nn-tasks = 3\nepisodes = 32\ninstances = 1\nseed = 4\nout = {}\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let cfg_str = cfg.display().to_string();
    let out = twinsched(&["sweep", "--config", &cfg_str]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let summary = read(&out_dir, "summary.csv");
    let rows: Vec<&str> = summary.lines().collect();
    assert_eq!(rows.len(), 3, "summary: {summary}");
    assert!(rows[1].starts_with("ql,0,"));
    assert!(rows[2].starts_with("dteql,2,"));
    assert!(out_dir.join("trace_ql_0_4.csv").exists());
    assert!(out_dir.join("trace_dteql_2_4.csv").exists());
}

#[test]
fn sweep_with_missing_config_fails() {
    let out = twinsched(&["sweep", "--config", "/nonexistent/sweep.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error"));
}
