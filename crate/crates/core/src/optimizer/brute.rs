//! Exhaustive enumeration, used as the exactness oracle for small problems.

use std::time::Instant;

use super::model::{tolerance, FlipState, Model};
use super::qubo::{Balance, QuadObjective};
use super::report::{Method, SolveReport, SolveStatus};
use crate::criteria::Design;
use crate::error::{Error, Result};

/// Default cap on the number of variables enumerated.
pub const DEFAULT_BRUTE_CAP: usize = 24;

/// Enumerates every design with `x_0 = +1` in Gray-code order (the objective
/// and the balance constraint are invariant under negation). Ties resolve to
/// the lexicographically smallest design, taking `−1 < +1`.
pub fn solve_brute(obj: &QuadObjective, balance: Option<&Balance>, cap: usize) -> Result<SolveReport> {
    let start = Instant::now();
    let n = obj.n;
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("objective has no variables".into()));
    }
    if let Some(b) = balance {
        if b.weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.weights.len(),
            });
        }
    }
    let model = Model::new(obj);
    let mut x = vec![-1i8; n];
    x[0] = 1;
    let mut state = FlipState::new(&model, x, balance);
    let feasible = |s: &FlipState| balance.is_none_or(|b| b.admits(s.balance));

    let mut best: Option<(f64, Vec<i8>)> = None;
    let mut consider = |s: &FlipState| {
        if !feasible(s) {
            return;
        }
        match &mut best {
            None => best = Some((s.value, s.x.clone())),
            Some((v, bx)) => {
                let tol = tolerance(*v);
                if s.value < *v - tol || (s.value <= *v + tol && s.x < *bx) {
                    *v = s.value;
                    bx.clone_from(&s.x);
                }
            }
        }
    };
    consider(&state);
    let total: u64 = 1u64 << (n - 1);
    for step in 1..total {
        // Gray code: flip variable 1 + (index of the lowest set bit).
        let i = 1 + step.trailing_zeros() as usize;
        state.flip(i, balance);
        if step & 0xFFFF == 0 {
            state.resync();
        }
        consider(&state);
    }
    let (_, x) = best.ok_or_else(|| Error::Infeasible("no design satisfies the balance constraint".into()))?;
    let design = Design::new(x)?;
    let objective = obj.value(&design);
    Ok(SolveReport {
        objective,
        lower_bound: objective,
        upper_bound_val: objective,
        gap: 0.0,
        method: Method::Brute,
        status: SolveStatus::Optimal,
        seed: 0,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        nodes_explored: Some(total),
        restarts: None,
        balance_bound: balance.map(|b| b.bound),
        balance_value: balance.map(|b| b.value(&design)),
        lower_bound_trace: Vec::new(),
        design,
    })
}
