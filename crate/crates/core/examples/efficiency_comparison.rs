//! D-efficiency of the modified design against the expected efficiency of a
//! random design on a generated 50-node network.
//!
//! ```bash
//! cargo run --release --example efficiency_comparison -- [seed] [budget_seconds]
//! ```

use std::time::Duration;

use netdesign::criteria::{d_efficiency, expected_random_efficiency};
use netdesign::netgraph::generate_random;
use netdesign::optimizer::{solve_modified, Method, SolverOptions};

fn main() -> netdesign::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));
    let budget: f64 = args.next().map_or(300.0, |s| s.parse().expect("budget"));

    let net = generate_random(50, 0.1, seed)?;
    println!("n=50 p=0.1 seed={seed}: {} edges", net.edge_count());

    let opts = SolverOptions {
        seed,
        time_budget: Duration::from_secs_f64(budget),
        ..Default::default()
    };
    let report = solve_modified(&net, 0.6, Method::BranchBound, &opts)?;
    println!(
        "modified (alpha=0.6): objective {} status {:?} gap {:.4} in {:.1}s, {} nodes",
        report.objective,
        report.status,
        report.gap,
        report.elapsed_seconds,
        report.nodes_explored.unwrap_or(0)
    );

    println!("rho,modified,random_expected");
    for rho in [0.0, 0.1, 0.2, 0.3] {
        println!(
            "{rho},{:.4},{:.4}",
            d_efficiency(&net, &report.design, rho)?,
            expected_random_efficiency(&net, rho)?
        );
    }
    Ok(())
}
