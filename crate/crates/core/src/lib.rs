//! D-optimal treatment allocation for A/B tests on networks whose outcomes
//! follow a conditional auto-regressive (CAR) model.
//!
//! The crate is organized by task:
//!
//! - [`netgraph`]: networks, edge-list IO, random generation, cluster unions.
//! - [`car`]: CAR sampling, response simulation, GLS/OLS and profile likelihood.
//! - [`criteria`]: designs, the determinant criterion, efficiency and its bound.
//! - [`optimizer`]: objectives, the linearized program, exact and heuristic
//!   solvers, cluster sign combination.
//! - [`simulation`]: the replicate protocol for the empirical variance of `β̂`.
//! - [`cli`]: the `netdesign` command-line front end.
//!
//! ```
//! use netdesign::netgraph::generate_random;
//! use netdesign::optimizer::{solve_modified, Method, SolverOptions};
//! use netdesign::criteria::d_efficiency;
//!
//! let net = generate_random(16, 0.3, 1).unwrap();
//! let report = solve_modified(&net, 0.6, Method::BranchBound, &SolverOptions::default()).unwrap();
//! let eff = d_efficiency(&net, &report.design, 0.2).unwrap();
//! assert!(eff > 0.0 && eff <= 1.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod car;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod netgraph;
pub mod optimizer;
pub mod rng;
pub mod simulation;

pub use criteria::Design;
pub use error::{Error, Result};
pub use netgraph::Network;
