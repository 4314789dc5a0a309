//! SVG drawing of a network colored by an optimized design.
//!
//! ```bash
//! cargo run --release --example render_network -- network.svg
//! ```

use netdesign::cli::{render_svg, RenderOptions};
use netdesign::netgraph::generate_random;
use netdesign::optimizer::{solve_modified, Method, SolverOptions};

fn main() -> netdesign::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "network.svg".into());
    let net = generate_random(30, 0.12, 5)?;
    let design = solve_modified(&net, 0.6, Method::BranchBound, &SolverOptions::default())?.design;
    std::fs::write(&path, render_svg(&net, Some(&design), &RenderOptions::default())?)?;
    println!("wrote {path}");
    Ok(())
}
