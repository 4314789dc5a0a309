//! Design construction: objective builders, the linearized MIP, exact and
//! heuristic solvers, and cluster sign combination.

mod branch_bound;
mod brute;
mod clusters;
mod local_search;
mod mip;
mod model;
mod quantile;
mod qubo;
mod report;

use std::time::Duration;

pub use branch_bound::{solve_branch_bound, BranchBoundOptions, DEFAULT_TIME_BUDGET};
pub use brute::{solve_brute, DEFAULT_BRUTE_CAP};
pub use clusters::{best_signs_dp, best_signs_enumerate, combine_clusters, ClusterCombination, ENUMERATION_LIMIT};
pub use local_search::{solve_local_search, steepest_descent, Descent};
pub use mip::{build_linearized_mip, BalanceRows, LinearizedMip, ProductVar};
pub use quantile::{calibrate_balance_bound, normal_cdf, normal_quantile};
pub use qubo::{build_modified_qubo, build_original_qubo, Balance, QuadObjective, SplitForm};
pub use report::{Method, SolveReport, SolveStatus};

use crate::error::Result;
use crate::netgraph::Network;

/// Default `alpha` for the balance-constrained problem.
pub const DEFAULT_ALPHA: f64 = 0.6;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub seed: u64,
    pub time_budget: Duration,
    pub node_limit: Option<u64>,
    pub brute_cap: usize,
    pub restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            time_budget: DEFAULT_TIME_BUDGET,
            node_limit: None,
            brute_cap: DEFAULT_BRUTE_CAP,
            restarts: 20,
        }
    }
}

/// Dispatches to the chosen solver.
pub fn solve(
    obj: &QuadObjective,
    balance: Option<&Balance>,
    method: Method,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    match method {
        Method::Brute => {
            let mut report = solve_brute(obj, balance, opts.brute_cap)?;
            report.seed = opts.seed;
            Ok(report)
        }
        Method::BranchBound => solve_branch_bound(
            obj,
            balance,
            &BranchBoundOptions {
                time_budget: opts.time_budget,
                node_limit: opts.node_limit,
                seed: opts.seed,
                incumbent_restarts: opts.restarts.min(8),
            },
        ),
        Method::LocalSearch => solve_local_search(obj, balance, opts.restarts, opts.seed),
    }
}

/// Minimizes `ΣΣ w_ij x_i x_j` subject to `|Σ m_i x_i| ≤ Δ(alpha)`.
pub fn solve_modified(net: &Network, alpha: f64, method: Method, opts: &SolverOptions) -> Result<SolveReport> {
    let balance = Balance::calibrated(net, alpha)?;
    solve(&build_modified_qubo(net), Some(&balance), method, opts)
}

/// Minimizes the unconstrained D-optimality objective for a given `rho`.
pub fn solve_original(net: &Network, rho: f64, method: Method, opts: &SolverOptions) -> Result<SolveReport> {
    solve(&build_original_qubo(net, rho)?, None, method, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{d_value, Design};
    use crate::error::Error;
    use crate::netgraph::generate_random;

    fn path2() -> Network {
        Network::from_edges(2, &[(0, 1)]).unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn path2_original() {
        for rho in [0.0, 0.3, 0.8] {
            for method in [Method::Brute, Method::BranchBound, Method::LocalSearch] {
                let r = solve_original(&path2(), rho, method, &opts()).unwrap();
                assert_eq!(r.design.values(), &[1, -1]);
                let a = rho / (1.0 - rho) * 2.0;
                assert!((r.objective + 2.0 * a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn star_balances_exactly() {
        let star = Network::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = solve_original(&star, 0.0, Method::Brute, &opts()).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.design.values(), &[1, -1, -1, -1]);
    }

    #[test]
    fn triangle_matches_d_maximizer() {
        let tri = Network::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = solve_original(&tri, 0.2, Method::Brute, &opts()).unwrap();
        let best = (0u32..8)
            .map(|b| Design::new((0..3).map(|i| if b >> i & 1 == 1 { 1 } else { -1 }).collect()).unwrap())
            .map(|x| d_value(&tri, &x, 0.2).unwrap())
            .fold(0.0, f64::max);
        assert!((d_value(&tri, &r.design, 0.2).unwrap() - best).abs() < 1e-9);
    }

    #[test]
    fn modified_examples() {
        let r = solve_modified(&path2(), 0.6, Method::Brute, &opts()).unwrap();
        assert_eq!(r.design.values(), &[1, -1]);
        assert_eq!(r.objective, -2.0);
        let k22 = Network::from_edges(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        for method in [Method::Brute, Method::BranchBound, Method::LocalSearch] {
            let r = solve_modified(&k22, 0.6, method, &opts()).unwrap();
            assert_eq!(r.objective, -8.0, "{method}");
            assert_eq!(r.balance_value, Some(0));
        }
    }

    #[test]
    fn infeasible_balance() {
        // Degrees (4, 2, 2, 1, 1): every signed sum is even, so a bound of 1 forces exactly 0.
        let net = Network::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)]).unwrap();
        let bal = Balance::for_network(&net, 1.0).unwrap();
        let r = solve_brute(&build_modified_qubo(&net), Some(&bal), 24).unwrap();
        assert_eq!(r.balance_value, Some(0));

        let obj = QuadObjective::from_pairs(2, &[(0, 1, 1.0)], 0.0).unwrap();
        let bal = Balance::new(vec![3, 2], 0.5).unwrap();
        assert!(matches!(solve_brute(&obj, Some(&bal), 24), Err(Error::Infeasible(_))));
        assert!(matches!(
            solve_branch_bound(&obj, Some(&bal), &BranchBoundOptions::default()),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            solve_local_search(&obj, Some(&bal), 3, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn brute_cap() {
        let net = generate_random(26, 0.2, 0).unwrap();
        assert!(matches!(
            solve_original(&net, 0.2, Method::Brute, &opts()),
            Err(Error::TooLarge { n: 26, cap: 24 })
        ));
    }

    #[test]
    fn branch_bound_matches_brute() {
        for seed in 0..30u64 {
            let n = 6 + (seed as usize % 9);
            let net = generate_random(n, 0.35, seed).unwrap();
            for rho in [0.0, 0.2, 0.5] {
                let obj = build_original_qubo(&net, rho).unwrap();
                let a = solve_brute(&obj, None, 24).unwrap();
                let b = solve_branch_bound(&obj, None, &BranchBoundOptions::default()).unwrap();
                assert!((a.objective - b.objective).abs() <= 1e-9 * a.objective.abs().max(1.0));
                assert!(b.is_optimal() && b.gap == 0.0);
            }
            let a = solve_modified(&net, 0.6, Method::Brute, &opts()).unwrap();
            let b = solve_modified(&net, 0.6, Method::BranchBound, &opts()).unwrap();
            assert_eq!(a.objective, b.objective);
            assert!(Balance::calibrated(&net, 0.6).unwrap().is_satisfied(&b.design));
        }
    }

    #[test]
    fn budget_exhaustion_reports_sound_gap() {
        let net = generate_random(60, 0.1, 4).unwrap();
        let obj = build_modified_qubo(&net);
        let bal = Balance::calibrated(&net, 0.6).unwrap();
        let r = solve_branch_bound(
            &obj,
            Some(&bal),
            &BranchBoundOptions {
                node_limit: Some(5_000),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::BudgetExceeded);
        assert!(r.lower_bound <= r.objective && r.gap >= 0.0);
        assert!(r.lower_bound_trace.windows(2).all(|w| w[0] <= w[1]));
        assert!(bal.is_satisfied(&r.design));
    }

    #[test]
    fn local_search_is_deterministic_and_descends() {
        let net = generate_random(40, 0.15, 9).unwrap();
        let obj = build_original_qubo(&net, 0.2).unwrap();
        let a = solve_local_search(&obj, None, 6, 3).unwrap();
        let b = solve_local_search(&obj, None, 6, 3).unwrap();
        assert_eq!(a.design, b.design);
        assert!(a.lower_bound <= a.objective);
        let start = crate::criteria::random_design(40, 1).unwrap();
        let d = steepest_descent(&obj, None, &start).unwrap();
        assert!(d.trajectory.windows(2).all(|w| w[1] <= w[0]));
        assert!((d.trajectory.last().unwrap() - d.objective).abs() < 1e-6 * d.objective.abs().max(1.0));
    }

    #[test]
    fn solutions_are_canonical() {
        let net = generate_random(12, 0.3, 2).unwrap();
        for method in [Method::Brute, Method::BranchBound, Method::LocalSearch] {
            let r = solve_original(&net, 0.1, method, &opts()).unwrap();
            assert_eq!(r.design.get(0), 1);
            let json = r.to_json().unwrap();
            let back: SolveReport = serde_json::from_str(&json).unwrap();
            assert_eq!(back.design, r.design);
        }
    }
}
