//! The three training loops: baseline Q-learning, twin-assisted
//! asynchronous Q-learning (a population of agents averaging their tables),
//! and twin-assisted exploring Q-learning (extra simulated actions per real
//! step), plus greedy policy evaluation.
//!
//! All extra interaction granted by the twin happens in environment clones;
//! the real environment sees exactly `episodes × N` steps no matter which
//! trainer runs, so comparisons between the methods are budget-honest.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::env::SchedEnv;
use crate::error::{Error, Result};
use crate::qtable::{average_tables, epsilon_schedule, HyperParams, QTable};
use crate::sched::{objective, Instance, Schedule, ScheduleReport};

/// One greedy-evaluation sample taken during training.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Number of completed training episodes when the evaluation ran.
    pub episode: usize,
    /// Exploration rate used during that episode.
    pub epsilon: f64,
    /// Objective of the greedy schedule at that point.
    pub total_cost: f64,
    pub misses: usize,
    pub avg_delay: f64,
    /// States stored in the (real agent's) table.
    pub table_states: usize,
}

/// Evaluation trace of one training run, plus interaction accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub records: Vec<TraceRecord>,
    /// Steps taken in the real environment: always `episodes × N`.
    pub real_steps: u64,
    /// Steps taken in environment clones (twin agents, simulated actions,
    /// and greedy evaluations).
    pub twin_steps: u64,
}

impl TrainingTrace {
    /// Cost recorded at the last evaluation point.
    pub fn final_cost(&self) -> Option<f64> {
        self.records.last().map(|r| r.total_cost)
    }
}

/// A trained table bound to the instance it was trained on.
#[derive(Debug, Clone)]
pub struct TrainedPolicy {
    pub table: QTable,
    pub instance: Instance,
    pub hyperparams: HyperParams,
}

/// Per-agent RNG seed derived from a master seed, mixed so that nearby
/// masters and agent indices give unrelated streams.
pub fn agent_seed(master: u64, agent: u64) -> u64 {
    let mut z = master ^ agent.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Rolls the table's greedy policy out in a clone of `env` and scores the
/// resulting schedule. Consumes no randomness and no real-environment steps.
pub fn greedy_schedule(table: &QTable, env: &SchedEnv) -> Result<(Schedule, ScheduleReport)> {
    let mut twin = env.clone_twin();
    twin.reset();
    while !twin.is_terminal() {
        let valid = twin.valid_actions();
        let action = table.best_action(twin.state(), &valid)?;
        twin.step(action)?;
    }
    let schedule = twin.schedule()?;
    let report = objective(twin.instance(), &schedule)?;
    Ok((schedule, report))
}

/// Greedy evaluation of a trained policy in (a clone of) `env`.
pub fn evaluate_policy(policy: &TrainedPolicy, env: &SchedEnv) -> Result<ScheduleReport> {
    greedy_schedule(&policy.table, env).map(|(_, report)| report)
}

fn should_record(done: usize, hp: &HyperParams) -> bool {
    done.is_multiple_of(hp.eval_interval) || done == hp.episodes
}

fn record_eval(
    records: &mut Vec<TraceRecord>,
    table: &QTable,
    env: &SchedEnv,
    episode: usize,
    epsilon: f64,
    twin_steps: &mut u64,
) -> Result<()> {
    let (_, report) = greedy_schedule(table, env)?;
    *twin_steps += env.num_tasks() as u64;
    records.push(TraceRecord {
        episode,
        epsilon,
        total_cost: report.total_cost,
        misses: report.misses,
        avg_delay: report.avg_delay,
        table_states: table.num_states(),
    });
    Ok(())
}

fn run_ql_episode<R: Rng>(
    env: &mut SchedEnv,
    table: &mut QTable,
    eps: f64,
    hp: &HyperParams,
    rng: &mut R,
) -> Result<()> {
    let mut state = env.reset();
    while !env.is_terminal() {
        let valid = env.valid_actions();
        let action = table.epsilon_greedy(&state, &valid, eps, rng)?;
        let tr = env.step(action)?;
        table.td_update(
            &state,
            action,
            tr.reward,
            &tr.next_state,
            &env.valid_actions(),
            hp,
        );
        state = tr.next_state;
    }
    Ok(())
}

fn run_dteql_episode<R: Rng>(
    env: &mut SchedEnv,
    table: &mut QTable,
    eps: f64,
    hp: &HyperParams,
    rng: &mut R,
    twin_steps: &mut u64,
) -> Result<()> {
    let mut state = env.reset();
    while !env.is_terminal() {
        let valid = env.valid_actions();
        let action = table.epsilon_greedy(&state, &valid, eps, rng)?;
        let snapshot = env.clone_twin();
        let tr = env.step(action)?;
        table.td_update(
            &state,
            action,
            tr.reward,
            &tr.next_state,
            &env.valid_actions(),
            hp,
        );
        // Simulated lookahead: try up to phi distinct alternatives from the
        // same pre-step state in a twin, each updated with its own outcome.
        // The cap comes before sampling so any phi >= |valid| consumes the
        // same amount of randomness.
        let k = hp.phi.min(valid.len());
        if k > 0 {
            let picks = rand::seq::index::sample(rng, valid.len(), k);
            for idx in picks.iter() {
                let sim_action = valid[idx];
                let mut twin = snapshot.clone_twin();
                let sim = twin.step(sim_action)?;
                table.td_update(
                    &state,
                    sim_action,
                    sim.reward,
                    &sim.next_state,
                    &twin.valid_actions(),
                    hp,
                );
                *twin_steps += twin.steps();
            }
        }
        state = tr.next_state;
    }
    Ok(())
}

/// Baseline tabular Q-learning with ε-greedy exploration and per-episode
/// ε decay. Records a greedy evaluation every `eval_interval` episodes and
/// after the final episode.
pub fn train_ql(
    env: &mut SchedEnv,
    hp: &HyperParams,
    seed: u64,
) -> Result<(TrainedPolicy, TrainingTrace)> {
    hp.validate()?;
    let real_before = env.steps();
    let mut table = QTable::new(env.num_tasks());
    let mut rng = ChaCha8Rng::seed_from_u64(agent_seed(seed, 0));
    let mut records = Vec::new();
    let mut twin_steps = 0u64;
    for ep in 0..hp.episodes {
        let eps = epsilon_schedule(ep, hp.eps_min, hp.beta);
        run_ql_episode(env, &mut table, eps, hp, &mut rng)?;
        if should_record(ep + 1, hp) {
            record_eval(&mut records, &table, env, ep + 1, eps, &mut twin_steps)?;
        }
    }
    let policy = TrainedPolicy {
        table,
        instance: env.instance().clone(),
        hyperparams: hp.clone(),
    };
    let trace = TrainingTrace {
        records,
        real_steps: env.steps() - real_before,
        twin_steps,
    };
    Ok((policy, trace))
}

/// Twin-assisted exploring Q-learning: one shared table, and at every real
/// step up to `phi` distinct alternative actions are additionally simulated
/// in the twin and TD-updated. With `phi = 0` this is bit for bit
/// [`train_ql`].
pub fn train_dteql(
    env: &mut SchedEnv,
    hp: &HyperParams,
    seed: u64,
) -> Result<(TrainedPolicy, TrainingTrace)> {
    hp.validate()?;
    let real_before = env.steps();
    let mut table = QTable::new(env.num_tasks());
    let mut rng = ChaCha8Rng::seed_from_u64(agent_seed(seed, 0));
    let mut records = Vec::new();
    let mut twin_steps = 0u64;
    for ep in 0..hp.episodes {
        let eps = epsilon_schedule(ep, hp.eps_min, hp.beta);
        run_dteql_episode(env, &mut table, eps, hp, &mut rng, &mut twin_steps)?;
        if should_record(ep + 1, hp) {
            record_eval(&mut records, &table, env, ep + 1, eps, &mut twin_steps)?;
        }
    }
    let policy = TrainedPolicy {
        table,
        instance: env.instance().clone(),
        hyperparams: hp.clone(),
    };
    let trace = TrainingTrace {
        records,
        real_steps: env.steps() - real_before,
        twin_steps,
    };
    Ok((policy, trace))
}

struct TwinAgent {
    table: QTable,
    env: SchedEnv,
    rng: ChaCha8Rng,
}

fn run_twin_block(
    agent: &mut TwinAgent,
    start: usize,
    block: usize,
    hp: &HyperParams,
) -> Result<()> {
    for e in 0..block {
        let eps = epsilon_schedule(start + e, hp.eps_min, hp.beta);
        run_ql_episode(&mut agent.env, &mut agent.table, eps, hp, &mut agent.rng)?;
    }
    Ok(())
}

/// Twin-assisted asynchronous Q-learning: one real agent plus `phi` twin
/// agents, each learning independently on its own environment clone with
/// its own RNG stream; every `delta` episodes all tables are replaced by
/// their entrywise mean. The returned policy and trace reflect only the
/// real agent. Twin agents run in parallel.
pub fn train_dtaql(
    env: &mut SchedEnv,
    hp: &HyperParams,
    seed: u64,
) -> Result<(TrainedPolicy, TrainingTrace)> {
    if hp.phi == 0 {
        return Err(Error::config("dtaql needs phi >= 1 twin agents"));
    }
    let seeds: Vec<u64> = (0..=hp.phi as u64).map(|i| agent_seed(seed, i)).collect();
    train_dtaql_with_agent_seeds(env, hp, &seeds, true)
}

/// [`train_dtaql`] with explicit per-agent seeds (`agent_seeds[0]` is the
/// real agent) and an explicit threading mode. Sequential and parallel
/// execution produce bit-identical results; the sequential mode exists as
/// the reference for exactly that check.
pub fn train_dtaql_with_agent_seeds(
    env: &mut SchedEnv,
    hp: &HyperParams,
    agent_seeds: &[u64],
    parallel: bool,
) -> Result<(TrainedPolicy, TrainingTrace)> {
    hp.validate()?;
    if agent_seeds.len() != hp.phi + 1 {
        return Err(Error::config(format!(
            "expected {} agent seeds (1 real + phi twins), got {}",
            hp.phi + 1,
            agent_seeds.len()
        )));
    }
    let n = env.num_tasks();
    let real_before = env.steps();
    let mut real_table = QTable::new(n);
    let mut real_rng = ChaCha8Rng::seed_from_u64(agent_seeds[0]);
    let mut twins: Vec<TwinAgent> = agent_seeds[1..]
        .iter()
        .map(|&s| TwinAgent {
            table: QTable::new(n),
            env: env.clone_twin(),
            rng: ChaCha8Rng::seed_from_u64(s),
        })
        .collect();
    let mut records = Vec::new();
    let mut twin_steps = 0u64;
    let mut completed = 0usize;
    while completed < hp.episodes {
        let block = hp.delta.min(hp.episodes - completed);
        let sync_after = (completed + block).is_multiple_of(hp.delta);
        // An evaluation due on the block's last episode is taken after the
        // averaging barrier, so the trace shows what synchronization did.
        let mut pending: Option<(usize, f64)> = None;
        for e in 0..block {
            let ep = completed + e;
            let eps = epsilon_schedule(ep, hp.eps_min, hp.beta);
            run_ql_episode(env, &mut real_table, eps, hp, &mut real_rng)?;
            let done = ep + 1;
            if should_record(done, hp) {
                if sync_after && e == block - 1 {
                    pending = Some((done, eps));
                } else {
                    record_eval(&mut records, &real_table, env, done, eps, &mut twin_steps)?;
                }
            }
        }
        if parallel {
            twins
                .par_iter_mut()
                .try_for_each(|a| run_twin_block(a, completed, block, hp))?;
        } else {
            for agent in &mut twins {
                run_twin_block(agent, completed, block, hp)?;
            }
        }
        if sync_after {
            let twin_tables: Vec<QTable> = twins.iter().map(|a| a.table.clone()).collect();
            let averaged = average_tables(&real_table, &twin_tables)?;
            for agent in &mut twins {
                agent.table = averaged.clone();
            }
            real_table = averaged;
        }
        if let Some((done, eps)) = pending {
            record_eval(&mut records, &real_table, env, done, eps, &mut twin_steps)?;
        }
        completed += block;
    }
    for agent in &twins {
        twin_steps += agent.env.steps();
    }
    let policy = TrainedPolicy {
        table: real_table,
        instance: env.instance().clone(),
        hyperparams: hp.clone(),
    };
    let trace = TrainingTrace {
        records,
        real_steps: env.steps() - real_before,
        twin_steps,
    };
    Ok((policy, trace))
}
