//! Experiment harness: batches of seeded instances, convergence detection,
//! metric aggregation, and CSV reports.
//!
//! A run trains one algorithm on `instances` independently generated
//! instances (seeds `seed`, `seed+1`, ...), evaluates the greedy policy and
//! the training trace of each, and aggregates into one summary row. All of
//! it is deterministic in the base seed, down to the report bytes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::algo::{evaluate_policy, train_dtaql, train_dteql, train_ql, TrainingTrace};
use crate::env::SchedEnv;
use crate::error::{Error, Result};
use crate::qtable::HyperParams;
use crate::sched::{
    brute_force_optimal, generate_instance, DistParams, ScheduleReport, ORACLE_LIMIT,
};

/// Which training loop to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Ql,
    Dtaql,
    Dteql,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Ql, Algo::Dtaql, Algo::Dteql];

    pub fn label(self) -> &'static str {
        match self {
            Algo::Ql => "ql",
            Algo::Dtaql => "dtaql",
            Algo::Dteql => "dteql",
        }
    }

    /// Twin count actually used: plain Q-learning has no twins.
    fn effective_phi(self, phi: usize) -> usize {
        match self {
            Algo::Ql => 0,
            _ => phi,
        }
    }

    /// Sync period actually used: only the multi-agent trainer averages.
    fn effective_delta(self, delta: usize) -> usize {
        match self {
            Algo::Dtaql => delta,
            _ => 0,
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ql" => Ok(Algo::Ql),
            "dtaql" => Ok(Algo::Dtaql),
            "dteql" => Ok(Algo::Dteql),
            other => Err(Error::config(format!(
                "unknown algorithm {other:?}, expected ql, dtaql, or dteql"
            ))),
        }
    }
}

/// Everything a run needs. Field names match the CLI flags and the config
/// file keys (kebab-case).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub n_tasks: usize,
    pub phi: usize,
    pub delta: usize,
    pub episodes: usize,
    pub instances: usize,
    pub seed: u64,
    pub lr: f64,
    pub gamma: f64,
    pub eps_min: f64,
    pub beta: f64,
    pub eval_interval: usize,
    /// Trailing evaluations the convergence detector treats as "final".
    pub window: usize,
    /// Relative slack around the final cost level.
    pub tolerance: f64,
    /// Divide achieved cost into the brute-force optimum. Requires
    /// `n_tasks` within the oracle limit.
    pub normalize: bool,
    pub dist: DistParams,
    pub out: Option<PathBuf>,
    /// Sweep grid; empty means just `algo`.
    pub algos: Vec<Algo>,
    /// Sweep grid; empty means just `phi`.
    pub phis: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let hp = HyperParams::default();
        ExperimentConfig {
            algo: Algo::Ql,
            n_tasks: 6,
            phi: hp.phi,
            delta: hp.delta,
            episodes: hp.episodes,
            instances: 20,
            seed: 0,
            lr: hp.lr,
            gamma: hp.gamma,
            eps_min: hp.eps_min,
            beta: hp.beta,
            eval_interval: hp.eval_interval,
            window: 10,
            tolerance: 0.01,
            normalize: true,
            dist: DistParams::default(),
            out: None,
            algos: Vec::new(),
            phis: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.hyperparams().validate()?;
        self.dist.validate()?;
        if self.n_tasks == 0 {
            return Err(Error::config("n-tasks must be at least 1"));
        }
        if self.instances == 0 {
            return Err(Error::config("instances must be at least 1"));
        }
        if self.window == 0 {
            return Err(Error::config("window must be at least 1"));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::config(format!(
                "tolerance must be in (0, 1), got {}",
                self.tolerance
            )));
        }
        if self.normalize && self.n_tasks > ORACLE_LIMIT {
            return Err(Error::config(format!(
                "normalization needs the brute-force optimum, which is infeasible for \
                 {} tasks (limit {ORACLE_LIMIT}); pass --no-normalize",
                self.n_tasks
            )));
        }
        if self.algo == Algo::Dtaql && self.phi == 0 {
            return Err(Error::config("dtaql needs phi >= 1"));
        }
        Ok(())
    }

    pub fn hyperparams(&self) -> HyperParams {
        HyperParams {
            lr: self.lr,
            gamma: self.gamma,
            eps_min: self.eps_min,
            beta: self.beta,
            phi: self.phi,
            delta: self.delta,
            episodes: self.episodes,
            eval_interval: self.eval_interval,
        }
    }

    /// Applies `key=value` lines from a config file: one pair per line,
    /// `#` starts a comment, blank lines are skipped. Keys are the CLI flag
    /// names without the leading dashes.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!(
                    "{}:{}: expected key=value, got {raw:?}",
                    path.display(),
                    idx + 1
                ))
            })?;
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Sets one configuration key from its text value.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::config(format!("bad value {value:?} for key {key:?}")))
        }
        match key {
            "algo" => self.algo = value.parse()?,
            "n-tasks" => self.n_tasks = num(key, value)?,
            "phi" => self.phi = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "episodes" => self.episodes = num(key, value)?,
            "instances" => self.instances = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "lr" => self.lr = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "eps-min" => self.eps_min = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "eval-interval" => self.eval_interval = num(key, value)?,
            "window" => self.window = num(key, value)?,
            "tolerance" => self.tolerance = num(key, value)?,
            "no-normalize" => self.normalize = !num::<bool>(key, value)?,
            "rate" => self.dist.rate = num(key, value)?,
            "cpu-freq" => self.dist.cpu_freq = num(key, value)?,
            "zeta" => self.dist.penalty = num(key, value)?,
            "data-low" => self.dist.data_low = num(key, value)?,
            "data-high" => self.dist.data_high = num(key, value)?,
            "complexity-low" => self.dist.complexity_low = num(key, value)?,
            "complexity-high" => self.dist.complexity_high = num(key, value)?,
            "deadline-low" => self.dist.deadline_low = num(key, value)?,
            "deadline-high" => self.dist.deadline_high = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "algos" => {
                self.algos = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<Vec<Algo>>>()?;
            }
            "phis" => {
                self.phis = value
                    .split(',')
                    .map(|s| num("phis", s.trim()))
                    .collect::<Result<Vec<usize>>>()?;
            }
            other => {
                return Err(Error::config(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }
}

/// One trained instance within an experiment.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub algo: Algo,
    pub phi: usize,
    /// Seed of both the instance and the training run.
    pub seed: u64,
    /// Brute-force optimal cost; present when normalization is on.
    pub oracle_cost: Option<f64>,
    pub trace: TrainingTrace,
    /// Greedy evaluation of the final policy.
    pub final_report: ScheduleReport,
    /// Episode at which the trace stabilized, if it did.
    pub convergence: Option<usize>,
}

/// Aggregated metrics of one experiment, one row of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algo: Algo,
    pub phi: usize,
    pub delta: usize,
    pub n_tasks: usize,
    /// Number of instances aggregated.
    pub seeds: usize,
    /// Episode cap, used to render "not converged" as `>cap`.
    pub episodes: usize,
    /// Mean oracle/achieved ratio; absent when normalization is off.
    pub normalized_reward: Option<f64>,
    /// Missed tasks over all tasks, across instances.
    pub miss_ratio: f64,
    /// Mean of the per-instance average completion times, seconds.
    pub avg_delay: f64,
    /// Upper median of per-instance convergence episodes; `None` when the
    /// median run never converged.
    pub convergence_episodes: Option<usize>,
}

/// A summary row together with the runs behind it.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub row: SummaryRow,
    pub runs: Vec<RunResult>,
}

/// Episode after which the trace stays at its final cost level.
///
/// The final level is the best cost among the last `window` evaluations;
/// the detector returns the earliest evaluated episode from which every
/// later evaluation stays within `(1 + tolerance)` of that level, or `None`
/// if even the trace's tail violates the bound.
pub fn convergence_time(trace: &TrainingTrace, window: usize, tolerance: f64) -> Option<usize> {
    let records = &trace.records;
    if records.is_empty() || window == 0 {
        return None;
    }
    let tail_start = records.len().saturating_sub(window);
    let best = records[tail_start..]
        .iter()
        .map(|r| r.total_cost)
        .fold(f64::INFINITY, f64::min);
    let bound = best * (1.0 + tolerance);
    let mut first = None;
    for record in records.iter().rev() {
        if record.total_cost <= bound {
            first = Some(record.episode);
        } else {
            break;
        }
    }
    first
}

/// Oracle-relative quality of an achieved cost: `oracle / achieved`, in
/// (0, 1], with 1 meaning optimal. An achieved cost below the oracle is a
/// bug in the oracle or the simulator and fails hard.
pub fn normalized_reward(achieved_cost: f64, oracle_cost: f64) -> Result<f64> {
    if !(achieved_cost > 0.0 && oracle_cost > 0.0) {
        return Err(Error::config(format!(
            "costs must be positive, got achieved={achieved_cost}, oracle={oracle_cost}"
        )));
    }
    if achieved_cost < oracle_cost {
        return Err(Error::CostBelowOracle {
            achieved: achieved_cost,
            oracle: oracle_cost,
        });
    }
    Ok(oracle_cost / achieved_cost)
}

fn run_single(config: &ExperimentConfig, seed: u64) -> Result<RunResult> {
    let algo = config.algo;
    let phi = algo.effective_phi(config.phi);
    let instance = generate_instance(config.n_tasks, &config.dist, seed)?;
    let oracle_cost = if config.normalize {
        Some(brute_force_optimal(&instance)?.1.total_cost)
    } else {
        None
    };
    let mut env = SchedEnv::new(instance);
    let mut hp = config.hyperparams();
    hp.phi = phi;
    let (policy, trace) = match algo {
        Algo::Ql => train_ql(&mut env, &hp, seed)?,
        Algo::Dtaql => train_dtaql(&mut env, &hp, seed)?,
        Algo::Dteql => train_dteql(&mut env, &hp, seed)?,
    };
    debug_assert_eq!(trace.real_steps, (hp.episodes * config.n_tasks) as u64);
    let final_report = evaluate_policy(&policy, &env)?;
    if let Some(oracle) = oracle_cost {
        normalized_reward(final_report.total_cost, oracle)?;
    }
    let convergence = convergence_time(&trace, config.window, config.tolerance);
    Ok(RunResult {
        algo,
        phi,
        seed,
        oracle_cost,
        trace,
        final_report,
        convergence,
    })
}

fn upper_median_convergence(mut values: Vec<Option<usize>>) -> Option<usize> {
    values.sort_by_key(|v| v.unwrap_or(usize::MAX));
    values[values.len() / 2]
}

/// Trains `config.algo` on `config.instances` seeded instances and
/// aggregates the results. Deterministic in `config.seed`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let mut runs = Vec::with_capacity(config.instances);
    for k in 0..config.instances {
        runs.push(run_single(config, config.seed.wrapping_add(k as u64))?);
    }
    let count = runs.len() as f64;
    let normalized = if config.normalize {
        let mut sum = 0.0;
        for run in &runs {
            sum += normalized_reward(
                run.final_report.total_cost,
                run.oracle_cost
                    .expect("normalization implies an oracle cost"),
            )?;
        }
        Some(sum / count)
    } else {
        None
    };
    let total_misses: usize = runs.iter().map(|r| r.final_report.misses).sum();
    let miss_ratio = total_misses as f64 / (config.instances * config.n_tasks) as f64;
    let avg_delay = runs.iter().map(|r| r.final_report.avg_delay).sum::<f64>() / count;
    let convergence_episodes =
        upper_median_convergence(runs.iter().map(|r| r.convergence).collect());
    let row = SummaryRow {
        algo: config.algo,
        phi: config.algo.effective_phi(config.phi),
        delta: config.algo.effective_delta(config.delta),
        n_tasks: config.n_tasks,
        seeds: config.instances,
        episodes: config.episodes,
        normalized_reward: normalized,
        miss_ratio,
        avg_delay,
        convergence_episodes,
    };
    Ok(ExperimentResult { row, runs })
}

/// Runs the grid of `config.algos` × `config.phis` (falling back to the
/// single configured algo/phi). Plain Q-learning appears once per sweep,
/// since phi does not apply to it.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<ExperimentResult>> {
    let algos = if config.algos.is_empty() {
        vec![config.algo]
    } else {
        config.algos.clone()
    };
    let phis = if config.phis.is_empty() {
        vec![config.phi]
    } else {
        config.phis.clone()
    };
    let mut results = Vec::new();
    for &algo in &algos {
        let cell_phis = match algo {
            Algo::Ql => vec![0],
            _ => phis.clone(),
        };
        for &phi in &cell_phis {
            let mut cell = config.clone();
            cell.algo = algo;
            cell.phi = phi;
            results.push(run_experiment(&cell)?);
        }
    }
    Ok(results)
}

/// Formats a number with 6 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.5e}")
        .parse()
        .expect("scientific form parses back");
    format!("{rounded}")
}

pub const SUMMARY_HEADER: &str =
    "algo,phi,delta,n_tasks,seeds,normalized_reward,miss_ratio,avg_delay,convergence_episodes";
pub const TRACE_HEADER: &str = "episode,epsilon,total_cost,normalized_reward,misses,avg_delay";

/// Writes `summary.csv` plus one `trace_<algo>_<phi>_<seed>.csv` per run
/// into `dir`, creating it if needed. Returns the written paths.
pub fn write_reports(results: &[ExperimentResult], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut summary = format!("{SUMMARY_HEADER}\n");
    for result in results {
        let row = &result.row;
        let norm = row.normalized_reward.map(fmt_sig).unwrap_or_default();
        let conv = match row.convergence_episodes {
            Some(e) => e.to_string(),
            None => format!(">{}", row.episodes),
        };
        summary.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.algo,
            row.phi,
            row.delta,
            row.n_tasks,
            row.seeds,
            norm,
            fmt_sig(row.miss_ratio),
            fmt_sig(row.avg_delay),
            conv,
        ));
    }
    let summary_path = dir.join("summary.csv");
    fs::write(&summary_path, summary).map_err(|e| Error::io(&summary_path, e))?;
    written.push(summary_path);
    for result in results {
        for run in &result.runs {
            let mut text = format!("{TRACE_HEADER}\n");
            for record in &run.trace.records {
                let norm = match run.oracle_cost {
                    Some(oracle) => fmt_sig(normalized_reward(record.total_cost, oracle)?),
                    None => String::new(),
                };
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    record.episode,
                    fmt_sig(record.epsilon),
                    fmt_sig(record.total_cost),
                    norm,
                    record.misses,
                    fmt_sig(record.avg_delay),
                ));
            }
            let path = dir.join(format!("trace_{}_{}_{}.csv", run.algo, run.phi, run.seed));
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}
