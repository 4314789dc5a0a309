//! Depth-first branch-and-bound over design entries.
//!
//! Node bound, with `A` the assigned variables and `F` the free ones:
//!
//! ```text
//! c + Σ_{i<j ∈ A} q_ij x_i x_j − Σ_{k ∈ F} |Σ_{j ∈ A} q_kj x_j| − Σ_{i<j ∈ F} |q_ij|
//!   + max(0, |Σ_{A} g_i x_i| − Σ_{F} |g_i|)²
//! ```
//!
//! Each free variable is charged the best sign against its assigned
//! neighbors, each free pair its best sign product, and the rank-one term its
//! smallest reachable square. Children never have a smaller bound than their
//! parent, so the global bound (minimum over open subtrees) is monotone.

use std::time::{Duration, Instant};

use super::local_search;
use super::model::{tolerance, Model};
use super::qubo::{Balance, QuadObjective};
use super::report::{relative_gap, Method, SolveReport, SolveStatus};
use crate::criteria::Design;
use crate::error::{Error, Result};

/// Default wall-clock budget per solve.
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(600);

#[derive(Debug, Clone)]
pub struct BranchBoundOptions {
    pub time_budget: Duration,
    /// Stop after this many nodes (deterministic alternative to the clock).
    pub node_limit: Option<u64>,
    /// Seed of the local search that provides the first incumbent.
    pub seed: u64,
    pub incumbent_restarts: usize,
}

impl Default for BranchBoundOptions {
    fn default() -> Self {
        Self {
            time_budget: DEFAULT_TIME_BUDGET,
            node_limit: None,
            seed: 0,
            incumbent_restarts: 8,
        }
    }
}

const CHECK_EVERY: u64 = 1024;

struct Search<'a> {
    model: &'a Model,
    balance: Option<&'a Balance>,
    order: Vec<usize>,
    x: Vec<i8>,
    /// Sparse field from assigned variables, kept for every node.
    field: Vec<f64>,
    assigned_value: f64,
    free_field_abs: f64,
    free_pair_abs: f64,
    g_assigned: f64,
    g_free_abs: f64,
    bal_assigned: i64,
    bal_free_abs: i64,

    incumbent: f64,
    best: Option<Vec<i8>>,
    nodes: u64,
    started: Instant,
    budget: Duration,
    node_limit: Option<u64>,
    aborted: bool,
    abort_min: f64,
    pending_min: Vec<f64>,
    trace: Vec<f64>,
}

impl<'a> Search<'a> {
    fn new(model: &'a Model, balance: Option<&'a Balance>, opts: &BranchBoundOptions) -> Self {
        let n = model.n;
        Self {
            model,
            balance,
            order: branching_order(model),
            x: vec![0; n],
            field: vec![0.0; n],
            assigned_value: 0.0,
            free_field_abs: 0.0,
            free_pair_abs: model.abs_sparse_sum,
            g_assigned: 0.0,
            g_free_abs: (0..n).map(|i| model.weight(i).abs()).sum(),
            bal_assigned: 0,
            bal_free_abs: balance.map_or(0, |b| b.weights.iter().map(|w| w.abs()).sum()),
            incumbent: f64::INFINITY,
            best: None,
            nodes: 0,
            started: Instant::now(),
            budget: opts.time_budget,
            node_limit: opts.node_limit,
            aborted: false,
            abort_min: f64::INFINITY,
            pending_min: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn bound(&self) -> f64 {
        let reach = (self.g_assigned.abs() - self.g_free_abs).max(0.0);
        self.model.constant + self.assigned_value - self.free_field_abs - self.free_pair_abs + reach * reach
    }

    fn balance_reachable(&self) -> bool {
        self.balance
            .is_none_or(|b| ((self.bal_assigned.abs() - self.bal_free_abs) as f64) <= b.bound)
    }

    fn assign(&mut self, v: usize, s: i8) {
        let sf = f64::from(s);
        self.assigned_value += sf * self.field[v];
        self.free_field_abs -= self.field[v].abs();
        self.x[v] = s;
        for &(k, q) in &self.model.adj[v] {
            if self.x[k] == 0 {
                let old = self.field[k].abs();
                self.field[k] += q * sf;
                self.free_field_abs += self.field[k].abs() - old;
                self.free_pair_abs -= q.abs();
            } else {
                self.field[k] += q * sf;
            }
        }
        let g = self.model.weight(v);
        self.g_assigned += g * sf;
        self.g_free_abs -= g.abs();
        if let Some(b) = self.balance {
            self.bal_assigned += b.weights[v] * i64::from(s);
            self.bal_free_abs -= b.weights[v].abs();
        }
    }

    fn unassign(&mut self, v: usize) {
        let s = self.x[v];
        let sf = f64::from(s);
        self.x[v] = 0;
        for &(k, q) in &self.model.adj[v] {
            if self.x[k] == 0 {
                let old = self.field[k].abs();
                self.field[k] -= q * sf;
                self.free_field_abs += self.field[k].abs() - old;
                self.free_pair_abs += q.abs();
            } else {
                self.field[k] -= q * sf;
            }
        }
        self.free_field_abs += self.field[v].abs();
        self.assigned_value -= sf * self.field[v];
        let g = self.model.weight(v);
        self.g_assigned -= g * sf;
        self.g_free_abs += g.abs();
        if let Some(b) = self.balance {
            self.bal_assigned -= b.weights[v] * i64::from(s);
            self.bal_free_abs += b.weights[v].abs();
        }
    }

    fn global_bound(&self, current: f64) -> f64 {
        let pending = self.pending_min.last().copied().unwrap_or(f64::INFINITY);
        self.incumbent.min(pending).min(current)
    }

    fn checkpoint(&mut self, bound: f64) {
        let lb = self.global_bound(bound);
        let last = self.trace.last().copied().unwrap_or(f64::NEG_INFINITY);
        self.trace.push(lb.max(last));
        let over_nodes = self.node_limit.is_some_and(|l| self.nodes >= l);
        if over_nodes || self.started.elapsed() >= self.budget {
            self.aborted = true;
        }
    }

    fn prunable(&self, bound: f64) -> bool {
        bound >= self.incumbent - tolerance(self.incumbent)
    }

    fn dfs(&mut self, depth: usize, bound: f64) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(CHECK_EVERY) {
            self.checkpoint(bound);
        }
        if self.aborted {
            self.abort_min = self.abort_min.min(bound);
            return;
        }
        if depth == self.order.len() {
            // All terms are exact at a leaf.
            if bound < self.incumbent - tolerance(self.incumbent) {
                self.incumbent = bound;
                self.best = Some(self.x.clone());
            }
            return;
        }
        let v = self.order[depth];
        let signs: &[i8] = if depth == 0 { &[1] } else { &[1, -1] };
        let mut kids: Vec<(i8, f64)> = Vec::with_capacity(2);
        for &s in signs {
            self.assign(v, s);
            if self.balance_reachable() {
                kids.push((s, self.bound().max(bound)));
            }
            self.unassign(v);
        }
        if kids.len() == 2 && kids[1].1 < kids[0].1 {
            kids.swap(0, 1);
        }
        for idx in 0..kids.len() {
            let (s, b) = kids[idx];
            if self.prunable(b) {
                continue;
            }
            if self.aborted {
                self.abort_min = self.abort_min.min(b);
                continue;
            }
            let sibling = kids.get(idx + 1).map(|k| k.1);
            if let Some(sb) = sibling {
                let prev = self.pending_min.last().copied().unwrap_or(f64::INFINITY);
                self.pending_min.push(prev.min(sb));
            }
            self.assign(v, s);
            self.dfs(depth + 1, b);
            self.unassign(v);
            if sibling.is_some() {
                self.pending_min.pop();
            }
        }
    }
}

/// Static order: start from the heaviest variable, then repeatedly take the
/// free variable most strongly coupled to those already ordered.
fn branching_order(model: &Model) -> Vec<usize> {
    let n = model.n;
    let total: Vec<f64> = (0..n)
        .map(|i| model.adj[i].iter().map(|&(_, q)| q.abs()).sum::<f64>() + model.weight(i).powi(2))
        .collect();
    let mut link = vec![0.0; n];
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&i| !placed[i])
            .max_by(|&a, &b| {
                link[a]
                    .partial_cmp(&link[b])
                    .unwrap()
                    .then(total[a].partial_cmp(&total[b]).unwrap())
                    .then(b.cmp(&a))
            })
            .expect("a free variable remains");
        placed[next] = true;
        order.push(next);
        for &(k, q) in &model.adj[next] {
            link[k] += q.abs();
        }
    }
    order
}

/// Exact minimization by branch-and-bound. When the budget runs out the best
/// incumbent is returned with status [`SolveStatus::BudgetExceeded`] and a
/// positive gap against the global bound of the unexplored subtrees.
pub fn solve_branch_bound(
    obj: &QuadObjective,
    balance: Option<&Balance>,
    opts: &BranchBoundOptions,
) -> Result<SolveReport> {
    let start = Instant::now();
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
    let model = Model::new(obj);
    let mut search = Search::new(&model, balance, opts);
    if opts.incumbent_restarts > 0 {
        if let Some((design, value)) = local_search::incumbent(obj, balance, opts.incumbent_restarts, opts.seed) {
            search.incumbent = value;
            search.best = Some(design.values().to_vec());
        }
    }
    let root = search.bound();
    search.trace.push(root.min(search.incumbent));
    search.dfs(0, root);

    let best = search.best.take().ok_or_else(|| {
        if search.aborted {
            Error::BudgetExhausted("no feasible design found before the budget ran out".into())
        } else {
            Error::Infeasible("no design satisfies the balance constraint".into())
        }
    })?;
    let design = Design::new(best)?.canonical();
    let objective = obj.value(&design);
    let (lower_bound, status) = if search.aborted {
        (search.abort_min.min(objective), SolveStatus::BudgetExceeded)
    } else {
        (objective, SolveStatus::Optimal)
    };
    let last = search.trace.last().copied().unwrap_or(f64::NEG_INFINITY);
    search.trace.push(lower_bound.max(last));
    Ok(SolveReport {
        objective,
        lower_bound,
        upper_bound_val: objective,
        gap: if search.aborted {
            relative_gap(objective, lower_bound)
        } else {
            0.0
        },
        method: Method::BranchBound,
        status,
        seed: opts.seed,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        nodes_explored: Some(search.nodes),
        restarts: None,
        balance_bound: balance.map(|b| b.bound),
        balance_value: balance.map(|b| b.value(&design)),
        lower_bound_trace: search.trace,
        design,
    })
}
