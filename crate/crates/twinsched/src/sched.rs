//! Deterministic task and timing model for single-user edge offloading.
//!
//! A frame consists of `N` tasks that must all be sent over one uplink to an
//! edge server with a single-core CPU. Data transmits at a fixed rate, one
//! task at a time, and the server executes tasks in arrival order, so the
//! only decision is the transmission order. This module provides the timing
//! recursion (ready and completion times), the penalized total-delay
//! objective, a seeded instance generator, and an exhaustive-permutation
//! optimum for use as ground truth.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest task count for which [`brute_force_optimal`] will enumerate all
/// permutations (10! is about 3.6 million schedules).
pub const ORACLE_LIMIT: usize = 10;

/// One offloadable job: data size in bits, CPU cycles needed per bit, and
/// the deadline in seconds by which it should complete.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Task {
    pub data_bits: f64,
    pub complexity: f64,
    pub deadline: f64,
}

impl Task {
    pub fn new(data_bits: f64, complexity: f64, deadline: f64) -> Result<Self> {
        let task = Task {
            data_bits,
            complexity,
            deadline,
        };
        task.validate()?;
        Ok(task)
    }

    fn validate(&self) -> Result<()> {
        if !self.data_bits.is_finite() || self.data_bits < 0.0 {
            return Err(Error::config(format!(
                "task data size must be finite and nonnegative, got {}",
                self.data_bits
            )));
        }
        if !self.complexity.is_finite() || self.complexity < 0.0 {
            return Err(Error::config(format!(
                "task complexity must be finite and nonnegative, got {}",
                self.complexity
            )));
        }
        if !self.deadline.is_finite() || self.deadline <= 0.0 {
            return Err(Error::config(format!(
                "task deadline must be finite and positive, got {}",
                self.deadline
            )));
        }
        Ok(())
    }
}

/// A frame's task set together with the channel and server constants: uplink
/// rate in bits/s, server CPU frequency in cycles/s, and the per-miss
/// penalty (in seconds-equivalent units) added to the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    tasks: Vec<Task>,
    rate: f64,
    cpu_freq: f64,
    penalty: f64,
}

impl Instance {
    pub fn new(tasks: Vec<Task>, rate: f64, cpu_freq: f64, penalty: f64) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::config("an instance needs at least one task"));
        }
        for task in &tasks {
            task.validate()?;
        }
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::config(format!("rate must be positive, got {rate}")));
        }
        if !cpu_freq.is_finite() || cpu_freq <= 0.0 {
            return Err(Error::config(format!(
                "cpu frequency must be positive, got {cpu_freq}"
            )));
        }
        if !penalty.is_finite() || penalty < 0.0 {
            return Err(Error::config(format!(
                "penalty must be nonnegative, got {penalty}"
            )));
        }
        Ok(Instance {
            tasks,
            rate,
            cpu_freq,
            penalty,
        })
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task(&self, index: usize) -> &Task {
        &self.tasks[index]
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn cpu_freq(&self) -> f64 {
        self.cpu_freq
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    /// Seconds the uplink spends on this task's data.
    pub fn transmit_time(&self, task: usize) -> f64 {
        self.tasks[task].data_bits / self.rate
    }

    /// Seconds the CPU spends executing this task.
    pub fn exec_time(&self, task: usize) -> f64 {
        let t = &self.tasks[task];
        t.data_bits * t.complexity / self.cpu_freq
    }
}

/// A transmission order: a permutation of the task indices `0..N`.
///
/// Validated at construction, so every `Schedule` is a real permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    order: Vec<usize>,
}

impl Schedule {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &task in &order {
            if task >= n || seen[task] {
                return Err(Error::InvalidPermutation { n });
            }
            seen[task] = true;
        }
        Ok(Schedule { order })
    }

    /// The schedule `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Self {
        Schedule {
            order: (0..n).collect(),
        }
    }

    pub(crate) fn from_order_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(Schedule::new(order.clone()).is_ok());
        Schedule { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// What a schedule costs: per-position completion times, the penalized
/// total, the number of deadline misses, and the mean completion time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReport {
    /// Completion time of the task at each queue position, in seconds.
    pub completion: Vec<f64>,
    /// Sum of completion times plus `penalty` for every missed deadline.
    pub total_cost: f64,
    /// Number of tasks that finished after their deadline.
    pub misses: usize,
    /// Mean completion time across queue positions, in seconds.
    pub avg_delay: f64,
}

/// Bounds and constants used by [`generate_instance`].
///
/// Task attributes are drawn uniformly from `[low, high)` per field; the
/// channel and server constants are copied into the instance as-is.
#[derive(Debug, Clone, PartialEq)]
pub struct DistParams {
    pub data_low: f64,
    pub data_high: f64,
    pub complexity_low: f64,
    pub complexity_high: f64,
    pub deadline_low: f64,
    pub deadline_high: f64,
    pub rate: f64,
    pub cpu_freq: f64,
    pub penalty: f64,
}

impl Default for DistParams {
    /// Task sizes up to 2 Mb, complexities up to 1000 cycles/bit, deadlines
    /// between 1 and 5 s, a 10 Mb/s uplink, a 10 GHz server CPU, and a 10 s
    /// penalty per missed deadline.
    fn default() -> Self {
        DistParams {
            data_low: 0.0,
            data_high: 2e6,
            complexity_low: 0.0,
            complexity_high: 1000.0,
            deadline_low: 1.0,
            deadline_high: 5.0,
            rate: 1e7,
            cpu_freq: 1e10,
            penalty: 10.0,
        }
    }
}

impl DistParams {
    pub fn validate(&self) -> Result<()> {
        let bounds = [
            ("data", self.data_low, self.data_high, 0.0),
            ("complexity", self.complexity_low, self.complexity_high, 0.0),
            (
                "deadline",
                self.deadline_low,
                self.deadline_high,
                f64::MIN_POSITIVE,
            ),
        ];
        for (name, low, high, min_low) in bounds {
            if !low.is_finite() || !high.is_finite() || low > high {
                return Err(Error::config(format!(
                    "{name} bounds must satisfy low <= high, got [{low}, {high}]"
                )));
            }
            if low < min_low {
                return Err(Error::config(format!(
                    "{name} lower bound {low} is too small"
                )));
            }
        }
        if !self.rate.is_finite() || self.rate <= 0.0 {
            return Err(Error::config(format!(
                "rate must be positive, got {}",
                self.rate
            )));
        }
        if !self.cpu_freq.is_finite() || self.cpu_freq <= 0.0 {
            return Err(Error::config(format!(
                "cpu frequency must be positive, got {}",
                self.cpu_freq
            )));
        }
        if !self.penalty.is_finite() || self.penalty < 0.0 {
            return Err(Error::config(format!(
                "penalty must be nonnegative, got {}",
                self.penalty
            )));
        }
        Ok(())
    }
}

/// Fills `out` with the completion time of every position in `order`.
///
/// `order` may be a prefix of a permutation; positions are computed in
/// sequence, so the k-th value here is bitwise identical to the k-th value
/// computed for any longer order sharing the same prefix.
pub(crate) fn completion_into(instance: &Instance, order: &[usize], out: &mut Vec<f64>) {
    out.clear();
    let mut ready = 0.0_f64;
    let mut prev = 0.0_f64;
    for &task in order {
        ready += instance.transmit_time(task);
        let done = ready.max(prev) + instance.exec_time(task);
        out.push(done);
        prev = done;
    }
}

/// Cost contribution of one queue position: its completion time plus the
/// miss penalty when the deadline was exceeded.
#[inline]
pub(crate) fn position_cost(completion: f64, deadline: f64, penalty: f64) -> f64 {
    if completion > deadline {
        completion + penalty
    } else {
        completion
    }
}

/// Sums position costs in queue order. Must stay the single source of the
/// accumulation order: the per-step rewards in the MDP are defined as the
/// negated terms of exactly this sum.
pub(crate) fn total_cost_of(instance: &Instance, order: &[usize], completion: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&task, &done) in order.iter().zip(completion) {
        total += position_cost(done, instance.tasks[task].deadline, instance.penalty);
    }
    total
}

pub(crate) fn report_for_order(instance: &Instance, order: &[usize]) -> ScheduleReport {
    let mut completion = Vec::with_capacity(order.len());
    completion_into(instance, order, &mut completion);
    let total_cost = total_cost_of(instance, order, &completion);
    let misses = order
        .iter()
        .zip(&completion)
        .filter(|&(&task, &done)| done > instance.tasks[task].deadline)
        .count();
    let avg_delay = completion.iter().sum::<f64>() / completion.len() as f64;
    ScheduleReport {
        completion,
        total_cost,
        misses,
        avg_delay,
    }
}

fn check_lengths(instance: &Instance, schedule: &Schedule) -> Result<()> {
    if schedule.len() != instance.num_tasks() {
        return Err(Error::LengthMismatch {
            schedule: schedule.len(),
            instance: instance.num_tasks(),
        });
    }
    Ok(())
}

/// Instant at which the data of the task at queue `position` (0-based) has
/// fully arrived at the server: the sum of the transmit times of that task
/// and everything queued before it.
pub fn ready_time(instance: &Instance, schedule: &Schedule, position: usize) -> Result<f64> {
    check_lengths(instance, schedule)?;
    if position >= schedule.len() {
        return Err(Error::PositionOutOfRange {
            position,
            n: schedule.len(),
        });
    }
    let mut ready = 0.0;
    for &task in &schedule.order()[..=position] {
        ready += instance.transmit_time(task);
    }
    Ok(ready)
}

/// Completion time of every queue position.
///
/// The first task finishes at its ready time plus its execution time; each
/// later task starts once both its data has arrived and the CPU is free:
/// `max(ready, previous completion) + execution time`.
pub fn completion_times(instance: &Instance, schedule: &Schedule) -> Result<Vec<f64>> {
    check_lengths(instance, schedule)?;
    let mut out = Vec::with_capacity(schedule.len());
    completion_into(instance, schedule.order(), &mut out);
    Ok(out)
}

/// Evaluates a schedule: total cost is the sum of completion times plus
/// `penalty` for every task that finishes after its deadline.
pub fn objective(instance: &Instance, schedule: &Schedule) -> Result<ScheduleReport> {
    check_lengths(instance, schedule)?;
    Ok(report_for_order(instance, schedule.order()))
}

/// Rearranges `perm` into the lexicographically next permutation, returning
/// false once the last permutation has been reached.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Finds the minimum-cost schedule by evaluating all `N!` permutations.
///
/// Ties are broken toward the lexicographically smallest order. Fails with
/// [`Error::OracleInfeasible`] above [`ORACLE_LIMIT`] tasks; it never falls
/// back to an approximation.
pub fn brute_force_optimal(instance: &Instance) -> Result<(Schedule, ScheduleReport)> {
    brute_force_optimal_limited(instance, ORACLE_LIMIT)
}

/// [`brute_force_optimal`] with an explicit permutation-count guard.
pub fn brute_force_optimal_limited(
    instance: &Instance,
    limit: usize,
) -> Result<(Schedule, ScheduleReport)> {
    let n = instance.num_tasks();
    if n > limit {
        return Err(Error::OracleInfeasible { n, limit });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut completion = Vec::with_capacity(n);
    let mut best_order = perm.clone();
    let mut best_cost = f64::INFINITY;
    loop {
        completion_into(instance, &perm, &mut completion);
        let cost = total_cost_of(instance, &perm, &completion);
        // Strict improvement keeps the lexicographically smallest optimum,
        // because permutations are visited in lexicographic order.
        if cost < best_cost {
            best_cost = cost;
            best_order.copy_from_slice(&perm);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let report = report_for_order(instance, &best_order);
    Ok((Schedule::from_order_unchecked(best_order), report))
}

fn uniform(rng: &mut ChaCha8Rng, low: f64, high: f64) -> f64 {
    if low == high {
        low
    } else {
        rng.gen_range(low..high)
    }
}

/// Draws a seeded random instance: `n` tasks with uniformly distributed
/// data size, complexity, and deadline, plus the constants from `dist`.
/// The same seed always produces the bit-identical instance.
pub fn generate_instance(n: usize, dist: &DistParams, seed: u64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::config("cannot generate an instance with zero tasks"));
    }
    dist.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tasks = Vec::with_capacity(n);
    for _ in 0..n {
        let data_bits = uniform(&mut rng, dist.data_low, dist.data_high);
        let complexity = uniform(&mut rng, dist.complexity_low, dist.complexity_high);
        let deadline = uniform(&mut rng, dist.deadline_low, dist.deadline_high);
        tasks.push(Task {
            data_bits,
            complexity,
            deadline,
        });
    }
    Instance::new(tasks, dist.rate, dist.cpu_freq, dist.penalty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    // proptest's prelude globs in rand 0.9's `Rng`; name ours explicitly.
    use rand::Rng;

    fn single_task_instance() -> Instance {
        Instance::new(vec![Task::new(8e6, 1000.0, 5.0).unwrap()], 8e6, 1e10, 10.0).unwrap()
    }

    #[test]
    fn ready_time_single_task() {
        let inst = single_task_instance();
        let s = Schedule::identity(1);
        assert_eq!(ready_time(&inst, &s, 0).unwrap(), 1.0);
    }

    #[test]
    fn ready_time_zero_data() {
        let tasks = vec![Task::new(0.0, 100.0, 1.0).unwrap(); 3];
        let inst = Instance::new(tasks, 1e6, 1e10, 0.0).unwrap();
        let s = Schedule::identity(3);
        for pos in 0..3 {
            assert_eq!(ready_time(&inst, &s, pos).unwrap(), 0.0);
        }
    }

    #[test]
    fn ready_time_is_order_independent_at_last_position() {
        let tasks = vec![
            Task::new(2e6, 1.0, 10.0).unwrap(),
            Task::new(6e6, 1.0, 10.0).unwrap(),
        ];
        let inst = Instance::new(tasks, 1e6, 1e10, 0.0).unwrap();
        let s = Schedule::new(vec![1, 0]).unwrap();
        // Independent hand summation over the full set: (2e6 + 6e6) / 1e6.
        let expected = (2e6 + 6e6) / 1e6;
        assert_eq!(ready_time(&inst, &s, 1).unwrap(), expected);
        assert_eq!(expected, 8.0);
    }

    #[test]
    fn ready_time_position_out_of_range() {
        let inst = single_task_instance();
        let s = Schedule::identity(1);
        assert!(matches!(
            ready_time(&inst, &s, 1),
            Err(Error::PositionOutOfRange { position: 1, n: 1 })
        ));
    }

    #[test]
    fn completion_single_task() {
        let inst = single_task_instance();
        let times = completion_times(&inst, &Schedule::identity(1)).unwrap();
        // 1.0 s transmit + 8e6 * 1000 / 1e10 = 0.8 s execution.
        assert_eq!(times, vec![1.8]);
    }

    #[test]
    fn completion_two_identical_tasks_transmit_bound() {
        let task = Task::new(8e6, 1000.0, 5.0).unwrap();
        let inst = Instance::new(vec![task, task], 8e6, 1e10, 10.0).unwrap();
        let times = completion_times(&inst, &Schedule::identity(2)).unwrap();
        // Second task's data arrives at 2.0 s, after the CPU frees at 1.8 s.
        assert_eq!(times, vec![1.8, 2.8]);
    }

    #[test]
    fn completion_cpu_bound_ignores_ready_time() {
        // Execution takes 100 s per task, dwarfing the 0.1 s transmissions.
        let task = Task::new(1e6, 1e6, 500.0).unwrap();
        let inst = Instance::new(vec![task, task], 1e7, 1e10, 0.0).unwrap();
        let times = completion_times(&inst, &Schedule::identity(2)).unwrap();
        let exec = inst.exec_time(1);
        assert_eq!(times[1], times[0] + exec);
    }

    #[test]
    fn schedule_rejects_non_permutations() {
        assert!(Schedule::new(vec![0, 0]).is_err());
        assert!(Schedule::new(vec![0, 2]).is_err());
        assert!(Schedule::new(vec![1, 2, 3]).is_err());
        assert!(Schedule::new(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn schedule_instance_length_mismatch() {
        let inst = single_task_instance();
        let s = Schedule::identity(2);
        assert!(matches!(
            completion_times(&inst, &s),
            Err(Error::LengthMismatch {
                schedule: 2,
                instance: 1
            })
        ));
    }

    #[test]
    fn objective_no_miss() {
        let inst = single_task_instance();
        let report = objective(&inst, &Schedule::identity(1)).unwrap();
        assert_eq!(report.total_cost, 1.8);
        assert_eq!(report.misses, 0);
        assert_eq!(report.avg_delay, 1.8);
    }

    #[test]
    fn objective_with_miss_penalty() {
        let inst =
            Instance::new(vec![Task::new(8e6, 1000.0, 1.0).unwrap()], 8e6, 1e10, 100.0).unwrap();
        let report = objective(&inst, &Schedule::identity(1)).unwrap();
        assert_eq!(report.total_cost, 101.8);
        assert_eq!(report.misses, 1);
    }

    #[test]
    fn objective_zero_penalty_is_sum_of_completions() {
        let inst = generate_instance(
            5,
            &DistParams {
                penalty: 0.0,
                ..DistParams::default()
            },
            7,
        )
        .unwrap();
        let s = Schedule::new(vec![3, 1, 4, 0, 2]).unwrap();
        let report = objective(&inst, &s).unwrap();
        let sum: f64 = report.completion.iter().sum();
        assert!((report.total_cost - sum).abs() <= 1e-12 * sum.abs());
    }

    #[test]
    fn oracle_singleton() {
        let inst = single_task_instance();
        let (schedule, report) = brute_force_optimal(&inst).unwrap();
        assert_eq!(schedule.order(), &[0]);
        assert_eq!(report.total_cost, 1.8);
    }

    #[test]
    fn oracle_identical_tasks_tie_break_to_identity() {
        let task = Task::new(1e6, 200.0, 4.0).unwrap();
        let inst = Instance::new(vec![task; 4], 1e7, 1e10, 10.0).unwrap();
        let (schedule, _) = brute_force_optimal(&inst).unwrap();
        assert_eq!(schedule.order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn oracle_matches_independent_enumeration() {
        // Re-enumerate all 5! orders recursively and evaluate the cost with
        // arithmetic written out from scratch.
        fn enumerate(inst: &Instance, chosen: &mut Vec<usize>, best: &mut f64) {
            let n = inst.num_tasks();
            if chosen.len() == n {
                let mut ready = 0.0;
                let mut prev: f64 = 0.0;
                let mut cost = 0.0;
                for &t in chosen.iter() {
                    ready += inst.task(t).data_bits / inst.rate();
                    let start = if ready > prev { ready } else { prev };
                    let done =
                        start + inst.task(t).data_bits * inst.task(t).complexity / inst.cpu_freq();
                    cost += done;
                    if done > inst.task(t).deadline {
                        cost += inst.penalty();
                    }
                    prev = done;
                }
                if cost < *best {
                    *best = cost;
                }
                return;
            }
            for t in 0..n {
                if !chosen.contains(&t) {
                    chosen.push(t);
                    enumerate(inst, chosen, best);
                    chosen.pop();
                }
            }
        }

        let inst = generate_instance(5, &DistParams::default(), 99).unwrap();
        let (_, report) = brute_force_optimal(&inst).unwrap();
        let mut best = f64::INFINITY;
        enumerate(&inst, &mut Vec::new(), &mut best);
        assert!((report.total_cost - best).abs() <= 1e-9 * best.abs());
    }

    #[test]
    fn oracle_never_beaten_by_any_permutation() {
        for seed in 0..4 {
            let inst = generate_instance(6, &DistParams::default(), seed).unwrap();
            let (_, best) = brute_force_optimal(&inst).unwrap();
            let mut perm: Vec<usize> = (0..6).collect();
            loop {
                let report = report_for_order(&inst, &perm);
                assert!(report.total_cost >= best.total_cost);
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
    }

    #[test]
    fn oracle_infeasible_above_limit() {
        let inst = generate_instance(4, &DistParams::default(), 0).unwrap();
        assert!(matches!(
            brute_force_optimal_limited(&inst, 3),
            Err(Error::OracleInfeasible { n: 4, limit: 3 })
        ));
    }

    #[test]
    fn generate_is_deterministic() {
        let a = generate_instance(8, &DistParams::default(), 42).unwrap();
        let b = generate_instance(8, &DistParams::default(), 42).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(8, &DistParams::default(), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generate_complexity_mean_near_center() {
        let inst = generate_instance(10_000, &DistParams::default(), 5).unwrap();
        let mean = inst.tasks().iter().map(|t| t.complexity).sum::<f64>() / inst.num_tasks() as f64;
        assert!(
            (mean - 500.0).abs() < 15.0,
            "mean complexity {mean} too far from 500"
        );
    }

    #[test]
    fn generate_rejects_bad_input() {
        assert!(generate_instance(0, &DistParams::default(), 0).is_err());
        let bad = DistParams {
            data_low: 3.0,
            data_high: 1.0,
            ..DistParams::default()
        };
        assert!(generate_instance(2, &bad, 0).is_err());
        let bad = DistParams {
            deadline_low: 0.0,
            deadline_high: 0.0,
            ..DistParams::default()
        };
        assert!(generate_instance(2, &bad, 0).is_err());
    }

    #[test]
    fn next_permutation_is_lexicographic_and_complete() {
        let mut perm = vec![0, 1, 2];
        let mut seen = vec![perm.clone()];
        while next_permutation(&mut perm) {
            seen.push(perm.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ]
        );
    }

    fn arb_instance(max_n: usize) -> impl Strategy<Value = Instance> {
        (1..=max_n, any::<u64>())
            .prop_map(|(n, seed)| generate_instance(n, &DistParams::default(), seed).unwrap())
    }

    proptest! {
        #[test]
        fn final_ready_time_is_permutation_invariant(
            inst in arb_instance(7),
            shuffle_seed in any::<u64>(),
        ) {
            let n = inst.num_tasks();
            let identity = Schedule::identity(n);
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let shuffled = Schedule::new(order).unwrap();
            let a = ready_time(&inst, &identity, n - 1).unwrap();
            let b = ready_time(&inst, &shuffled, n - 1).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn completion_dominates_ready_and_is_nondecreasing(inst in arb_instance(7)) {
            let n = inst.num_tasks();
            let s = Schedule::identity(n);
            let completion = completion_times(&inst, &s).unwrap();
            let mut prev = 0.0;
            for (pos, &done) in completion.iter().enumerate() {
                let ready = ready_time(&inst, &s, pos).unwrap();
                prop_assert!(done >= ready);
                prop_assert!(done >= prev);
                prev = done;
            }
            let all_busy = (0..n).all(|t| inst.exec_time(t) > 0.0);
            if all_busy {
                for pos in 1..n {
                    prop_assert!(completion[pos] > completion[pos - 1]);
                }
            }
        }

        #[test]
        fn objective_penalty_decomposition(inst in arb_instance(6), zeta in 0.0..50.0f64) {
            let n = inst.num_tasks();
            let s = Schedule::identity(n);
            let with = Instance::new(inst.tasks().to_vec(), inst.rate(), inst.cpu_freq(), zeta)
                .unwrap();
            let without = Instance::new(inst.tasks().to_vec(), inst.rate(), inst.cpu_freq(), 0.0)
                .unwrap();
            let a = objective(&with, &s).unwrap();
            let b = objective(&without, &s).unwrap();
            let gap = a.total_cost - b.total_cost;
            let expect = zeta * a.misses as f64;
            prop_assert!((gap - expect).abs() <= 1e-9 * expect.abs().max(1.0));
            prop_assert_eq!(a.misses, b.misses);
        }
    }
}
