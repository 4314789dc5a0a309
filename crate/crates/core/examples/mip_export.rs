//! Linearized mixed-integer program in CPLEX LP format, for an external solver.
//!
//! ```bash
//! cargo run --example mip_export -- modified.lp
//! ```

use netdesign::netgraph::generate_random;
use netdesign::optimizer::{build_linearized_mip, build_modified_qubo, build_original_qubo, Balance};

fn main() -> netdesign::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "modified.lp".into());
    let net = generate_random(30, 0.1, 1)?;

    let original = build_linearized_mip(&build_original_qubo(&net, 0.2)?, None)?;
    let modified = build_linearized_mip(&build_modified_qubo(&net), Some(&Balance::calibrated(&net, 0.6)?))?;
    for (name, mip) in [("original", &original), ("modified", &modified)] {
        println!(
            "{name}: {} binary, {} continuous, {} constraints; quadratic = {} * mip + {}",
            mip.num_binary(),
            mip.num_continuous(),
            mip.num_constraints(),
            mip.scale,
            mip.offset
        );
    }
    std::fs::write(&path, modified.to_lp())?;
    println!("wrote {path}");
    Ok(())
}
