//! The balance-constrained design: minimize neighbour agreement subject to
//! `|sum m_i x_i| <= Delta(alpha)`, for several alpha.
//!
//! ```bash
//! cargo run --release --example modified_design
//! ```

use netdesign::criteria::d_efficiency;
use netdesign::netgraph::generate_random;
use netdesign::optimizer::{calibrate_balance_bound, solve_modified, Method, SolverOptions};

fn main() -> netdesign::Result<()> {
    let net = generate_random(40, 0.1, 2)?;
    println!("alpha,delta,imbalance,objective,eff_rho_0.2,status,seconds");
    for alpha in [0.55, 0.6, 0.7, 0.8, 0.9] {
        let r = solve_modified(&net, alpha, Method::BranchBound, &SolverOptions::default())?;
        println!(
            "{alpha},{:.3},{},{},{:.4},{:?},{:.3}",
            calibrate_balance_bound(&net, alpha)?,
            r.balance_value.unwrap_or(0),
            r.objective,
            d_efficiency(&net, &r.design, 0.2)?,
            r.status,
            r.elapsed_seconds
        );
    }
    Ok(())
}
