//! Episodic MDP formulation of the scheduling problem.
//!
//! An episode builds one schedule from front to back. The state is the
//! ordered sequence of tasks committed so far (order matters: the pending
//! ready and completion times depend on it), an action picks one of the
//! remaining tasks for the next queue position, and the reward is the
//! negated cost contribution of that position. Summed over a full episode
//! the rewards equal the negated schedule objective, bit for bit, so a
//! return-maximizing policy is exactly a cost-minimizing scheduler.

use std::fmt;

use crate::error::{Error, Result};
use crate::sched::{position_cost, Instance, Schedule};

/// A task index chosen for the next queue position.
pub type Action = usize;

/// Ordered prefix of the schedule built so far. Two prefixes with the same
/// task set but different orders are different states.
///
/// Orders lexicographically by prefix, which table dumps use to sort.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    scheduled: Vec<usize>,
}

impl State {
    pub fn empty() -> Self {
        State::default()
    }

    pub fn scheduled(&self) -> &[usize] {
        &self.scheduled
    }

    pub fn len(&self) -> usize {
        self.scheduled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scheduled.is_empty()
    }

    pub(crate) fn child(&self, action: Action) -> State {
        let mut scheduled = Vec::with_capacity(self.scheduled.len() + 1);
        scheduled.extend_from_slice(&self.scheduled);
        scheduled.push(action);
        State { scheduled }
    }
}

impl fmt::Display for State {
    /// Renders as `-` for the empty prefix, else the task indices joined
    /// with commas, e.g. `2,0,1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scheduled.is_empty() {
            return f.write_str("-");
        }
        for (i, task) in self.scheduled.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{task}")?;
        }
        Ok(())
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub next_state: State,
    pub reward: f64,
    pub terminal: bool,
}

/// Environment for one task instance.
///
/// Keeps the running uplink and CPU clocks incrementally, using the same
/// arithmetic as the batch timing functions in [`crate::sched`], so per-step
/// quantities agree bitwise with a whole-schedule evaluation.
#[derive(Debug, Clone)]
pub struct SchedEnv {
    instance: Instance,
    state: State,
    remaining: Vec<bool>,
    ready: f64,
    prev_completion: f64,
    steps: u64,
}

impl SchedEnv {
    pub fn new(instance: Instance) -> Self {
        let n = instance.num_tasks();
        SchedEnv {
            instance,
            state: State::empty(),
            remaining: vec![true; n],
            ready: 0.0,
            prev_completion: 0.0,
            steps: 0,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn num_tasks(&self) -> usize {
        self.instance.num_tasks()
    }

    /// Lifetime count of [`step`](Self::step) calls; `reset` does not clear
    /// it, so it measures total interaction, not episode length.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    /// Starts a fresh episode and returns the initial (empty) state.
    pub fn reset(&mut self) -> State {
        self.state = State::empty();
        self.remaining.iter_mut().for_each(|r| *r = true);
        self.ready = 0.0;
        self.prev_completion = 0.0;
        self.state.clone()
    }

    /// Unscheduled task indices in ascending order. Empty iff the episode
    /// is over.
    pub fn valid_actions(&self) -> Vec<Action> {
        self.remaining
            .iter()
            .enumerate()
            .filter_map(|(task, &open)| open.then_some(task))
            .collect()
    }

    pub fn is_terminal(&self) -> bool {
        self.state.len() == self.instance.num_tasks()
    }

    /// Commits `action` to the next queue position.
    ///
    /// The reward is the negated position cost: completion time plus the
    /// miss penalty if the task's deadline was exceeded.
    pub fn step(&mut self, action: Action) -> Result<Transition> {
        if action >= self.remaining.len() || !self.remaining[action] {
            return Err(Error::InvalidAction { task: action });
        }
        self.remaining[action] = false;
        self.ready += self.instance.transmit_time(action);
        let done = self.ready.max(self.prev_completion) + self.instance.exec_time(action);
        self.prev_completion = done;
        self.state = self.state.child(action);
        self.steps += 1;
        let cost = position_cost(
            done,
            self.instance.task(action).deadline,
            self.instance.penalty(),
        );
        Ok(Transition {
            next_state: self.state.clone(),
            reward: -cost,
            terminal: self.is_terminal(),
        })
    }

    /// Independent copy for a twin: same instance, same mid-episode
    /// position, fresh step counter.
    pub fn clone_twin(&self) -> SchedEnv {
        let mut twin = self.clone();
        twin.steps = 0;
        twin
    }

    /// The completed schedule, available once the episode is terminal.
    pub fn schedule(&self) -> Result<Schedule> {
        if !self.is_terminal() {
            return Err(Error::config("episode is not finished, no schedule yet"));
        }
        Schedule::new(self.state.scheduled().to_vec())
    }
}
