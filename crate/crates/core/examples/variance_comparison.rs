//! Empirical variance of the treatment estimate for each design method on a
//! generated 50-node network with rho = 0.3, beta = 2, sigma^2 = 1.
//!
//! ```bash
//! cargo run --release --example variance_comparison -- [reps] [random_designs]
//! ```

use std::time::Instant;

use netdesign::car::CarParams;
use netdesign::netgraph::generate_random;
use netdesign::optimizer::{solve_modified, solve_original, Method, SolverOptions};
use netdesign::simulation::{random_design_study, variance_study, Estimator, StudyOptions};

fn main() -> netdesign::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().map_or(500, |s| s.parse().expect("reps"));
    let designs: usize = args.next().map_or(100, |s| s.parse().expect("random designs"));

    let net = generate_random(50, 0.1, 7)?;
    let rho = 0.3;
    let params = CarParams::new(0.0, 2.0, rho, 1.0)?;
    let opts = SolverOptions::default();
    let modified = solve_modified(&net, 0.6, Method::BranchBound, &opts)?.design;
    let original = solve_original(&net, rho, Method::BranchBound, &opts)?.design;

    println!("method,fit,variance,seconds");
    for estimator in [Estimator::Car, Estimator::Lm] {
        let study = StudyOptions {
            reps,
            estimator,
            seed: 11,
            noiseless: false,
        };
        for (name, design) in [("original", &original), ("modified", &modified)] {
            let t = Instant::now();
            let v = variance_study(&net, design, params, &study)?.variance;
            println!("{name},{estimator},{v:.5},{:.1}", t.elapsed().as_secs_f64());
        }
        let t = Instant::now();
        let r = random_design_study(&net, params, designs, &study)?;
        println!(
            "random,{estimator},{:.5},{:.1}",
            r.mean_variance,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
