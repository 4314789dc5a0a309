//! The unconstrained D-optimal design for a given rho, found by brute force,
//! branch-and-bound and multistart local search.
//!
//! ```bash
//! cargo run --release --example original_design
//! ```

use netdesign::criteria::d_efficiency;
use netdesign::netgraph::generate_random;
use netdesign::optimizer::{solve_original, Method, SolverOptions};

fn main() -> netdesign::Result<()> {
    let net = generate_random(20, 0.2, 4)?;
    let rho = 0.2;
    let opts = SolverOptions {
        seed: 1,
        ..Default::default()
    };
    println!("solver,objective,lower_bound,status,efficiency,seconds");
    for method in [Method::Brute, Method::BranchBound, Method::LocalSearch] {
        let r = solve_original(&net, rho, method, &opts)?;
        println!(
            "{method},{:.4},{:.4},{:?},{:.4},{:.3}",
            r.objective,
            r.lower_bound,
            r.status,
            d_efficiency(&net, &r.design, rho)?,
            r.elapsed_seconds
        );
    }
    Ok(())
}
