use serde::{Deserialize, Serialize};

use crate::criteria::Design;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    BranchBound,
    LocalSearch,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::BranchBound => "branch_bound",
            Method::LocalSearch => "local_search",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// The search space was exhausted.
    Optimal,
    /// The time or node budget ran out; the incumbent is returned.
    BudgetExceeded,
    /// Heuristic result without a proof of optimality.
    Heuristic,
}

/// Outcome of a design solve.
///
/// The gap is `(upper − lower) / |upper|` (denominator 1 when the incumbent
/// value is zero) and is exactly 0 when optimality is proven.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub design: Design,
    pub objective: f64,
    pub lower_bound: f64,
    pub upper_bound_val: f64,
    pub gap: f64,
    pub method: Method,
    pub status: SolveStatus,
    pub seed: u64,
    pub elapsed_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes_explored: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance_value: Option<i64>,
    /// Global lower bound sampled during branch-and-bound, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lower_bound_trace: Vec<f64>,
}

impl SolveReport {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

pub(crate) fn relative_gap(upper: f64, lower: f64) -> f64 {
    let denom = if upper.abs() > 1e-12 { upper.abs() } else { 1.0 };
    ((upper - lower) / denom).max(0.0)
}
