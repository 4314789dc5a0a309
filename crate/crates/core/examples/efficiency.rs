//! The determinant criterion, its upper bound and D-efficiency for a few
//! hand-made designs.
//!
//! ```bash
//! cargo run --example efficiency
//! ```

use netdesign::criteria::{d_upper_bound, evaluate, expected_random_efficiency, prop1_objective, Design};
use netdesign::netgraph::Network;

fn main() -> netdesign::Result<()> {
    // A 6-cycle: alternating assignment cuts every edge and is perfectly balanced.
    let ring = Network::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])?;
    let designs = [
        ("alternating", Design::new(vec![1, -1, 1, -1, 1, -1])?),
        ("halves", Design::new(vec![1, 1, 1, -1, -1, -1])?),
        ("unbalanced", Design::new(vec![1, 1, 1, 1, -1, -1])?),
        ("constant", Design::constant(6, 1)?),
    ];
    let rho = 0.3;
    println!("upper bound at rho={rho}: {}", d_upper_bound(&ring, rho)?);
    println!("design,d_value,efficiency,var_beta_over_sigma2,prop1_objective");
    for (name, x) in &designs {
        let r = evaluate(&ring, x, rho)?;
        println!(
            "{name},{},{:.4},{:.4},{}",
            r.d_value,
            r.efficiency,
            r.beta_variance_over_sigma2,
            prop1_objective(&ring, x, rho)?
        );
    }
    println!(
        "expected efficiency of a random design: {:.4}",
        expected_random_efficiency(&ring, rho)?
    );
    Ok(())
}
