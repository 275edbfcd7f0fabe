//! Sparse tabular Q-values with ε-greedy selection, TD(0) updates, the
//! exploration decay schedule, and the table-averaging reduction used by the
//! multi-agent trainer.
//!
//! The table is a map from state to a dense per-action value vector; states
//! never visited are simply absent and read as all zeros. With nonpositive
//! rewards that zero default doubles as optimistic initialization, which is
//! what pushes the greedy policy to try untouched actions.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::env::{Action, State};
use crate::error::{Error, Result};

/// Learning constants shared by all trainers.
///
/// `phi` and `delta` only matter for the twin-assisted trainers; `phi = 0`
/// is permitted and turns those trainers into plain Q-learning.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Learning rate, in (0, 1].
    pub lr: f64,
    /// Discount factor, in [0, 1]. 1 keeps episode return equal to the
    /// negated schedule cost.
    pub gamma: f64,
    /// Exploration floor, in [0, 1).
    pub eps_min: f64,
    /// Exploration decay constant, in episodes.
    pub beta: f64,
    /// Twin count (agents or sampled actions, depending on the trainer).
    pub phi: usize,
    /// Episodes between table-averaging synchronizations.
    pub delta: usize,
    /// Training episodes.
    pub episodes: usize,
    /// Episodes between greedy evaluations recorded in the trace.
    pub eval_interval: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            lr: 0.1,
            gamma: 1.0,
            eps_min: 0.1,
            beta: 5000.0,
            phi: 8,
            delta: 512,
            episodes: 25_600,
            eval_interval: 8,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr <= 1.0) {
            return Err(Error::config(format!(
                "lr must be in (0, 1], got {}",
                self.lr
            )));
        }
        if !(self.gamma >= 0.0 && self.gamma <= 1.0) {
            return Err(Error::config(format!(
                "gamma must be in [0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.eps_min >= 0.0 && self.eps_min < 1.0) {
            return Err(Error::config(format!(
                "eps-min must be in [0, 1), got {}",
                self.eps_min
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::config(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if self.delta == 0 {
            return Err(Error::config("delta must be at least 1"));
        }
        if self.episodes == 0 {
            return Err(Error::config("episodes must be at least 1"));
        }
        if self.eval_interval == 0 {
            return Err(Error::config("eval-interval must be at least 1"));
        }
        Ok(())
    }
}

/// Exploration rate for episode `i`: `eps_min + (1 - eps_min)·e^(-i/beta)`.
/// Starts at exactly 1.0 and decays toward `eps_min`.
pub fn epsilon_schedule(i: usize, eps_min: f64, beta: f64) -> f64 {
    eps_min + (1.0 - eps_min) * (-(i as f64) / beta).exp()
}

/// Sparse state-action value table. Absent entries read as exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_actions: usize,
    entries: HashMap<State, Vec<f64>>,
}

impl QTable {
    pub fn new(n_actions: usize) -> Self {
        QTable {
            n_actions,
            entries: HashMap::new(),
        }
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Number of states with a stored row.
    pub fn num_states(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, state: &State, action: Action) -> f64 {
        debug_assert!(action < self.n_actions);
        self.entries.get(state).map_or(0.0, |row| row[action])
    }

    pub fn set(&mut self, state: &State, action: Action, value: f64) {
        debug_assert!(action < self.n_actions);
        let row = self
            .entries
            .entry(state.clone())
            .or_insert_with(|| vec![0.0; self.n_actions]);
        row[action] = value;
    }

    /// Highest-valued action among `valid`, lowest task index on ties.
    pub fn best_action(&self, state: &State, valid: &[Action]) -> Result<Action> {
        let row = self.entries.get(state);
        let mut best: Option<(Action, f64)> = None;
        for &action in valid {
            let value = row.map_or(0.0, |r| r[action]);
            // Strict > keeps the earliest (lowest-index) maximizer, because
            // valid_actions lists tasks in ascending order.
            if best.is_none_or(|(_, bv)| value > bv) {
                best = Some((action, value));
            }
        }
        best.map(|(a, _)| a).ok_or(Error::NoValidActions)
    }

    /// Max value over `valid`, or 0 when `valid` is empty (terminal states
    /// bootstrap to zero).
    pub fn max_value(&self, state: &State, valid: &[Action]) -> f64 {
        if valid.is_empty() {
            return 0.0;
        }
        let row = self.entries.get(state);
        valid
            .iter()
            .map(|&a| row.map_or(0.0, |r| r[a]))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// With probability `eps` a uniform random valid action, otherwise
    /// [`best_action`](Self::best_action).
    ///
    /// Always draws one uniform for the explore/exploit decision and a
    /// second draw only when exploring, so callers sharing an RNG stream
    /// stay aligned step for step.
    pub fn epsilon_greedy<R: Rng>(
        &self,
        state: &State,
        valid: &[Action],
        eps: f64,
        rng: &mut R,
    ) -> Result<Action> {
        if valid.is_empty() {
            return Err(Error::NoValidActions);
        }
        if rng.gen::<f64>() < eps {
            Ok(valid[rng.gen_range(0..valid.len())])
        } else {
            self.best_action(state, valid)
        }
    }

    /// One TD(0) backup: `Q ← Q + lr·(r + γ·max_next − Q)` where `max_next`
    /// is taken over `next_valid` (0 when empty). Returns the new value.
    pub fn td_update(
        &mut self,
        state: &State,
        action: Action,
        reward: f64,
        next_state: &State,
        next_valid: &[Action],
        hp: &HyperParams,
    ) -> f64 {
        let target = reward + hp.gamma * self.max_value(next_state, next_valid);
        let old = self.get(state, action);
        let new = old + hp.lr * (target - old);
        self.set(state, action, new);
        new
    }

    /// Serializes the table as one line per state: the state key, then the
    /// N action values, space-separated. Lines are sorted by state key so
    /// equal tables produce equal text.
    pub fn to_text(&self) -> String {
        let mut keys: Vec<&State> = self.entries.keys().collect();
        keys.sort();
        let mut out = String::new();
        for key in keys {
            out.push_str(&key.to_string());
            for value in &self.entries[key] {
                out.push(' ');
                out.push_str(&format!("{value:?}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format.
    pub fn from_text(text: &str, n_actions: usize) -> Result<Self> {
        let mut table = QTable::new(n_actions);
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let key = fields.next().expect("non-empty line has a first field");
            let state = parse_state(key).ok_or_else(|| Error::BadTableDump {
                line: lineno,
                reason: format!("bad state key {key:?}"),
            })?;
            let mut row = Vec::with_capacity(n_actions);
            for field in fields {
                let value: f64 = field.parse().map_err(|_| Error::BadTableDump {
                    line: lineno,
                    reason: format!("bad value {field:?}"),
                })?;
                row.push(value);
            }
            if row.len() != n_actions {
                return Err(Error::BadTableDump {
                    line: lineno,
                    reason: format!("expected {n_actions} values, found {}", row.len()),
                });
            }
            table.entries.insert(state, row);
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path, n_actions: usize) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        QTable::from_text(&text, n_actions)
    }
}

fn parse_state(key: &str) -> Option<State> {
    if key == "-" {
        return Some(State::empty());
    }
    let mut state = State::empty();
    for part in key.split(',') {
        state = state.child(part.parse().ok()?);
    }
    Some(state)
}

/// Entrywise mean of `main` and all `twins`, absent entries counting as 0.
///
/// Summation runs in the given agent order (main first, then twins in slice
/// order) so the result is bit-reproducible.
pub fn average_tables(main: &QTable, twins: &[QTable]) -> Result<QTable> {
    for twin in twins {
        if twin.n_actions != main.n_actions {
            return Err(Error::TableShapeMismatch {
                left: main.n_actions,
                right: twin.n_actions,
            });
        }
    }
    let mut keys: BTreeSet<&State> = main.entries.keys().collect();
    for twin in twins {
        keys.extend(twin.entries.keys());
    }
    let count = (1 + twins.len()) as f64;
    let mut entries = HashMap::with_capacity(keys.len());
    for key in keys {
        let mut sums = vec![0.0_f64; main.n_actions];
        for table in std::iter::once(main).chain(twins) {
            if let Some(row) = table.entries.get(key) {
                for (sum, value) in sums.iter_mut().zip(row) {
                    *sum += value;
                }
            }
        }
        for sum in &mut sums {
            *sum /= count;
        }
        entries.insert(key.clone(), sums);
    }
    Ok(QTable {
        n_actions: main.n_actions,
        entries,
    })
}
