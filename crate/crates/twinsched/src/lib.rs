//! Digital-twin-assisted tabular Q-learning for single-user edge task
//! scheduling.
//!
//! A frame of `N` tasks must be offloaded over one uplink to an edge server
//! with a single-core CPU; the only decision is the transmission order.
//! This crate simulates the timing model, learns orders with tabular
//! Q-learning, and measures how much faster learning gets when a digital
//! twin (a perfect simulated copy of the environment) supplies extra,
//! free interactions. Two twin-assisted variants are implemented: a
//! population of agents that periodically average their Q-tables
//! ([`algo::train_dtaql`]), and a single agent that simulates alternative
//! actions at every real step ([`algo::train_dteql`]). Both leave the real
//! interaction budget at exactly `episodes × N` steps.
//!
//! The [`harness`] module batches seeded runs, detects convergence, and
//! writes CSV reports; the `twinsched` binary exposes it on the command
//! line. Every run is deterministic in its seed, byte for byte.
//!
//! # Example
//!
//! ```
//! use twinsched::{
//!     brute_force_optimal, evaluate_policy, generate_instance, train_dteql,
//!     DistParams, HyperParams, SchedEnv,
//! };
//!
//! let instance = generate_instance(3, &DistParams::default(), 7).unwrap();
//! let (_, oracle) = brute_force_optimal(&instance).unwrap();
//!
//! let mut env = SchedEnv::new(instance);
//! let hp = HyperParams { phi: 3, episodes: 500, ..HyperParams::default() };
//! let (policy, _) = train_dteql(&mut env, &hp, 0).unwrap();
//!
//! let report = evaluate_policy(&policy, &env).unwrap();
//! assert_eq!(report.total_cost, oracle.total_cost);
//! ```

pub mod algo;
pub mod env;
pub mod error;
pub mod harness;
pub mod qtable;
pub mod sched;

pub use algo::{
    agent_seed, evaluate_policy, greedy_schedule, train_dtaql, train_dtaql_with_agent_seeds,
    train_dteql, train_ql, TraceRecord, TrainedPolicy, TrainingTrace,
};
pub use env::{Action, SchedEnv, State, Transition};
pub use error::{Error, Result};
pub use harness::{
    convergence_time, fmt_sig, normalized_reward, run_experiment, run_sweep, write_reports, Algo,
    ExperimentConfig, ExperimentResult, RunResult, SummaryRow,
};
pub use qtable::{average_tables, epsilon_schedule, HyperParams, QTable};
pub use sched::{
    brute_force_optimal, brute_force_optimal_limited, completion_times, generate_instance,
    objective, ready_time, DistParams, Instance, Schedule, ScheduleReport, Task, ORACLE_LIMIT,
};

/// The guide under `book/` doubles as a test suite: every Rust block in its
/// chapters compiles and runs against this crate.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/task-model.md")]
    pub mod task_model {}
    #[doc = include_str!("../../../book/src/mdp.md")]
    pub mod mdp {}
    #[doc = include_str!("../../../book/src/q-learning.md")]
    pub mod q_learning {}
    #[doc = include_str!("../../../book/src/digital-twin.md")]
    pub mod digital_twin {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
