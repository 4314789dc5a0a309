//! Designs built cluster by cluster, then sign-flipped so the union is
//! degree-balanced.
//!
//! ```bash
//! cargo run --release --example combine_clusters
//! ```

use netdesign::netgraph::generate_random;
use netdesign::optimizer::{combine_clusters, solve_modified, Method, SolverOptions};

fn main() -> netdesign::Result<()> {
    let mut clusters = Vec::new();
    for k in 0..8 {
        let net = generate_random(30, 0.15, 100 + k)?;
        let design = solve_modified(&net, 0.9, Method::LocalSearch, &SolverOptions::default())?.design;
        clusters.push((net, design));
    }
    let combined = combine_clusters(&clusters)?;
    println!("cluster imbalances: {:?}", combined.sums);
    println!("signs: {:?}", combined.signs);
    println!("achieved (sum c_k s_k)^2 = {}", combined.value);
    println!("combined design has {} nodes", combined.design.len());
    Ok(())
}
