//! Multistart steepest descent over 1-flip and 2-swap neighborhoods.

use std::time::Instant;

use rand::Rng as _;
use rayon::prelude::*;

use super::model::{tolerance, FlipState, Model};
use super::qubo::{Balance, QuadObjective};
use super::report::{relative_gap, Method, SolveReport, SolveStatus};
use crate::criteria::Design;
use crate::error::{Error, Result};
use crate::rng;

/// Fresh random starts tried per restart when repair fails.
const REPAIR_ATTEMPTS: u64 = 16;

/// Result of a single descent run.
#[derive(Debug, Clone)]
pub struct Descent {
    pub design: Design,
    pub objective: f64,
    /// Objective after each accepted move, starting with the initial value.
    pub trajectory: Vec<f64>,
}

struct Scratch {
    coupling: Vec<f64>,
}

fn best_flip(state: &FlipState, balance: Option<&Balance>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for i in 0..state.x.len() {
        if let Some(b) = balance {
            if !b.admits(state.balance - 2 * b.weights[i] * i64::from(state.x[i])) {
                continue;
            }
        }
        let d = state.flip_delta(i);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best
}

fn best_swap(
    model: &Model,
    state: &FlipState,
    balance: Option<&Balance>,
    scratch: &mut Scratch,
) -> Option<(usize, usize, f64)> {
    let n = state.x.len();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        if state.x[i] != 1 {
            continue;
        }
        for &(j, q) in &model.adj[i] {
            scratch.coupling[j] = q;
        }
        let gi = model.weight(i);
        let bal_i = balance.map(|b| state.balance - 2 * b.weights[i]);
        for j in 0..n {
            if state.x[j] != -1 {
                continue;
            }
            if let (Some(b), Some(bi)) = (balance, bal_i) {
                if !b.admits(bi + 2 * b.weights[j]) {
                    continue;
                }
            }
            let q = scratch.coupling[j] + 2.0 * gi * model.weight(j);
            let d = state.pair_delta(i, j, q);
            if best.is_none_or(|(_, _, bd)| d < bd) {
                best = Some((i, j, d));
            }
        }
        for &(j, _) in &model.adj[i] {
            scratch.coupling[j] = 0.0;
        }
    }
    best
}

fn descend(
    model: &Model,
    state: &mut FlipState,
    balance: Option<&Balance>,
    scratch: &mut Scratch,
    mut trajectory: Option<&mut Vec<f64>>,
) {
    if let Some(t) = trajectory.as_deref_mut() {
        t.push(state.value);
    }
    let mut moves = 0u64;
    loop {
        let tol = tolerance(state.value);
        let mut improved = false;
        if let Some((i, d)) = best_flip(state, balance) {
            if d < -tol {
                state.flip(i, balance);
                improved = true;
            }
        }
        if !improved {
            if let Some((i, j, d)) = best_swap(model, state, balance, scratch) {
                if d < -tol {
                    state.flip(i, balance);
                    state.flip(j, balance);
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
        moves += 1;
        if moves.is_multiple_of(1024) {
            state.resync();
        }
        if let Some(t) = trajectory.as_deref_mut() {
            t.push(state.value);
        }
    }
    state.resync();
}

/// Greedy flips that shrink `|Σ w_i x_i|` until the constraint holds.
fn repair(state: &mut FlipState, balance: &Balance) -> bool {
    while !balance.admits(state.balance) {
        let current = state.balance.abs();
        let mut best: Option<(usize, i64)> = None;
        for i in 0..state.x.len() {
            let after = (state.balance - 2 * balance.weights[i] * i64::from(state.x[i])).abs();
            if after < current && best.is_none_or(|(_, b)| after < b) {
                best = Some((i, after));
            }
        }
        match best {
            Some((i, _)) => state.flip(i, Some(balance)),
            None => return false,
        }
    }
    true
}

fn check_dims(obj: &QuadObjective, balance: Option<&Balance>) -> Result<()> {
    if obj.n == 0 {
        return Err(Error::InvalidParameter("objective has no variables".into()));
    }
    if let Some(b) = balance {
        if b.weights.len() != obj.n {
            return Err(Error::DimensionMismatch {
                expected: obj.n,
                actual: b.weights.len(),
            });
        }
    }
    Ok(())
}

/// Runs one descent from `start`. The start must already satisfy the balance
/// constraint; moves that would violate it are never taken.
pub fn steepest_descent(obj: &QuadObjective, balance: Option<&Balance>, start: &Design) -> Result<Descent> {
    check_dims(obj, balance)?;
    start.check_len(obj.n)?;
    if let Some(b) = balance {
        if !b.is_satisfied(start) {
            return Err(Error::Infeasible(
                "starting design violates the balance constraint".into(),
            ));
        }
    }
    let model = Model::new(obj);
    let mut state = FlipState::new(&model, start.values().to_vec(), balance);
    let mut scratch = Scratch {
        coupling: vec![0.0; obj.n],
    };
    let mut trajectory = Vec::new();
    descend(&model, &mut state, balance, &mut scratch, Some(&mut trajectory));
    let design = Design::new(state.x)?;
    Ok(Descent {
        objective: obj.value(&design),
        design,
        trajectory,
    })
}

fn run_restart(model: &Model, balance: Option<&Balance>, seed: u64, restart: usize) -> Option<(f64, Vec<i8>)> {
    let n = model.n;
    let mut scratch = Scratch { coupling: vec![0.0; n] };
    for attempt in 0..REPAIR_ATTEMPTS {
        let mut rng = rng::substream(rng::derive_seed(seed, restart as u64), attempt);
        let x: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let mut state = FlipState::new(model, x, balance);
        if let Some(b) = balance {
            if !repair(&mut state, b) {
                continue;
            }
        }
        descend(model, &mut state, balance, &mut scratch, None);
        let mut x = state.x;
        if x[0] == -1 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        return Some((state.value, x));
    }
    None
}

/// Best of `restarts` independent descents. Restarts run in parallel; each
/// draws from its own stream derived from `(seed, restart)` and the winner is
/// the lowest objective, ties resolved by canonical design order, so the
/// result does not depend on the thread count.
pub fn solve_local_search(
    obj: &QuadObjective,
    balance: Option<&Balance>,
    restarts: usize,
    seed: u64,
) -> Result<SolveReport> {
    let start = Instant::now();
    check_dims(obj, balance)?;
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let model = Model::new(obj);
    let results: Vec<(f64, Vec<i8>)> = (0..restarts)
        .into_par_iter()
        .filter_map(|r| run_restart(&model, balance, seed, r))
        .collect();
    let (design, objective) = select_best(obj, results)
        .ok_or_else(|| Error::Infeasible("no restart reached a design within the balance bound".into()))?;
    let lower_bound = model.root_bound().min(objective);
    Ok(SolveReport {
        objective,
        lower_bound,
        upper_bound_val: objective,
        gap: relative_gap(objective, lower_bound),
        method: Method::LocalSearch,
        status: SolveStatus::Heuristic,
        seed,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        nodes_explored: None,
        restarts: Some(restarts),
        balance_bound: balance.map(|b| b.bound),
        balance_value: balance.map(|b| b.value(&design)),
        lower_bound_trace: Vec::new(),
        design,
    })
}

pub(crate) fn select_best(obj: &QuadObjective, results: Vec<(f64, Vec<i8>)>) -> Option<(Design, f64)> {
    let min = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let x = results
        .into_iter()
        .filter(|r| r.0 <= min + tolerance(min))
        .map(|r| r.1)
        .min()?;
    let design = Design::new(x).ok()?;
    let value = obj.value(&design);
    Some((design, value))
}

/// Best design found by a quick multistart run, used to seed branch-and-bound.
pub(crate) fn incumbent(
    obj: &QuadObjective,
    balance: Option<&Balance>,
    restarts: usize,
    seed: u64,
) -> Option<(Design, f64)> {
    let model = Model::new(obj);
    let results = (0..restarts)
        .filter_map(|r| run_restart(&model, balance, seed, r))
        .collect();
    select_best(obj, results)
}
