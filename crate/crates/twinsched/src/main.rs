use std::path::PathBuf;
use std::process;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use twinsched::error::{Error, Result};
use twinsched::harness::{
    fmt_sig, run_experiment, run_sweep, write_reports, Algo, ExperimentConfig, ExperimentResult,
};
use twinsched::sched::{brute_force_optimal, generate_instance, DistParams};

#[derive(Parser)]
#[command(
    name = "twinsched",
    version,
    about = "Digital-twin-assisted Q-learning for edge task scheduling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one algorithm on a batch of seeded instances and write CSV reports
    Run(Box<RunArgs>),
    /// Print the brute-force optimal schedule for a seeded instance
    Oracle(OracleArgs),
    /// Run an algo/phi grid from a config file
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm: ql, dtaql, or dteql
    #[arg(long, value_parser = Algo::from_str)]
    algo: Option<Algo>,
    /// Tasks per frame
    #[arg(long)]
    n_tasks: Option<usize>,
    /// Twin agents (dtaql) or simulated actions per step (dteql)
    #[arg(long)]
    phi: Option<usize>,
    /// Episodes between table averaging (dtaql)
    #[arg(long)]
    delta: Option<usize>,
    /// Training episodes per instance
    #[arg(long)]
    episodes: Option<usize>,
    /// Number of seeded instances
    #[arg(long)]
    instances: Option<usize>,
    /// Base seed; instance k uses seed + k
    #[arg(long)]
    seed: Option<u64>,
    /// key=value config file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the brute-force oracle and the normalized-reward columns
    #[arg(long)]
    no_normalize: bool,
    /// Learning rate
    #[arg(long)]
    lr: Option<f64>,
    /// Discount factor
    #[arg(long)]
    gamma: Option<f64>,
    /// Exploration floor
    #[arg(long)]
    eps_min: Option<f64>,
    /// Exploration decay constant, in episodes
    #[arg(long)]
    beta: Option<f64>,
    /// Episodes between greedy evaluations
    #[arg(long)]
    eval_interval: Option<usize>,
    /// Trailing evaluations defining the converged level
    #[arg(long)]
    window: Option<usize>,
    /// Relative slack of the convergence detector
    #[arg(long)]
    tolerance: Option<f64>,
    /// Uplink rate, bits/s
    #[arg(long)]
    rate: Option<f64>,
    /// Server CPU frequency, cycles/s
    #[arg(long)]
    cpu_freq: Option<f64>,
    /// Penalty per missed deadline
    #[arg(long)]
    zeta: Option<f64>,
    /// Task data size lower bound, bits
    #[arg(long)]
    data_low: Option<f64>,
    /// Task data size upper bound, bits
    #[arg(long)]
    data_high: Option<f64>,
    /// Task complexity lower bound, cycles/bit
    #[arg(long)]
    complexity_low: Option<f64>,
    /// Task complexity upper bound, cycles/bit
    #[arg(long)]
    complexity_high: Option<f64>,
    /// Deadline lower bound, seconds
    #[arg(long)]
    deadline_low: Option<f64>,
    /// Deadline upper bound, seconds
    #[arg(long)]
    deadline_high: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    /// Tasks per frame
    #[arg(long)]
    n_tasks: usize,
    /// Instance seed
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// key=value config file; `algos` and `phis` define the grid
    #[arg(long)]
    config: PathBuf,
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::default();
    if let Some(path) = &args.config {
        config.apply_file(path)?;
    }
    if let Some(v) = args.algo {
        config.algo = v;
    }
    if let Some(v) = args.n_tasks {
        config.n_tasks = v;
    }
    if let Some(v) = args.phi {
        config.phi = v;
    }
    if let Some(v) = args.delta {
        config.delta = v;
    }
    if let Some(v) = args.episodes {
        config.episodes = v;
    }
    if let Some(v) = args.instances {
        config.instances = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.lr {
        config.lr = v;
    }
    if let Some(v) = args.gamma {
        config.gamma = v;
    }
    if let Some(v) = args.eps_min {
        config.eps_min = v;
    }
    if let Some(v) = args.beta {
        config.beta = v;
    }
    if let Some(v) = args.eval_interval {
        config.eval_interval = v;
    }
    if let Some(v) = args.window {
        config.window = v;
    }
    if let Some(v) = args.tolerance {
        config.tolerance = v;
    }
    if let Some(v) = args.rate {
        config.dist.rate = v;
    }
    if let Some(v) = args.cpu_freq {
        config.dist.cpu_freq = v;
    }
    if let Some(v) = args.zeta {
        config.dist.penalty = v;
    }
    if let Some(v) = args.data_low {
        config.dist.data_low = v;
    }
    if let Some(v) = args.data_high {
        config.dist.data_high = v;
    }
    if let Some(v) = args.complexity_low {
        config.dist.complexity_low = v;
    }
    if let Some(v) = args.complexity_high {
        config.dist.complexity_high = v;
    }
    if let Some(v) = args.deadline_low {
        config.dist.deadline_low = v;
    }
    if let Some(v) = args.deadline_high {
        config.dist.deadline_high = v;
    }
    if args.no_normalize {
        config.normalize = false;
    }
    if let Some(v) = &args.out {
        config.out = Some(v.clone());
    }
    Ok(config)
}

fn required_out(config: &ExperimentConfig) -> Result<PathBuf> {
    config.out.clone().ok_or_else(|| {
        Error::config("output directory required; pass --out DIR or set out= in the config file")
    })
}

fn print_rows(results: &[ExperimentResult]) {
    for result in results {
        let row = &result.row;
        let norm = row
            .normalized_reward
            .map(fmt_sig)
            .unwrap_or_else(|| "-".into());
        let conv = row
            .convergence_episodes
            .map(|e| e.to_string())
            .unwrap_or_else(|| format!(">{}", row.episodes));
        println!(
            "{} phi={} delta={} n={} seeds={} normalized_reward={} miss_ratio={} \
             avg_delay={} convergence={}",
            row.algo,
            row.phi,
            row.delta,
            row.n_tasks,
            row.seeds,
            norm,
            fmt_sig(row.miss_ratio),
            fmt_sig(row.avg_delay),
            conv,
        );
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let config = build_config(args)?;
    config.validate()?;
    let out = required_out(&config)?;
    let result = run_experiment(&config)?;
    let written = write_reports(std::slice::from_ref(&result), &out)?;
    print_rows(std::slice::from_ref(&result));
    println!("wrote {} files to {}", written.len(), out.display());
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let instance = generate_instance(args.n_tasks, &DistParams::default(), args.seed)?;
    let (schedule, report) = brute_force_optimal(&instance)?;
    let order: Vec<String> = schedule.order().iter().map(|t| t.to_string()).collect();
    println!("instance: {} tasks, seed {}", args.n_tasks, args.seed);
    println!("optimal order: {}", order.join(","));
    println!("total cost: {}", fmt_sig(report.total_cost));
    println!("misses: {}", report.misses);
    println!("avg delay: {}", fmt_sig(report.avg_delay));
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let mut config = ExperimentConfig::default();
    config.apply_file(&args.config)?;
    let out = required_out(&config)?;
    let results = run_sweep(&config)?;
    let written = write_reports(&results, &out)?;
    print_rows(&results);
    println!("wrote {} files to {}", written.len(), out.display());
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        process::exit(1);
    }
}
