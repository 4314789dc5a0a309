//! Exact draws from the CAR noise distribution and simulated responses.
//!
//! ```bash
//! cargo run --release --example car_sampling
//! ```

use netdesign::car::{precision_matrix, simulate_responses, CarParams, CarSampler};
use netdesign::criteria::Design;
use netdesign::netgraph::Network;
use netdesign::rng::rng_from_seed;

fn main() -> netdesign::Result<()> {
    let tri = Network::from_edges(3, &[(0, 1), (1, 2), (0, 2)])?;
    let (rho, sigma2) = (0.3, 2.0);
    let sampler = CarSampler::new(&tri, rho, sigma2)?;
    let mut rng = rng_from_seed(1);

    let draws = 100_000;
    let mut cov = [[0.0; 3]; 3];
    for _ in 0..draws {
        let d = sampler.draw(&mut rng);
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j] / draws as f64;
            }
        }
    }
    let exact = precision_matrix(&tri, rho)?.try_inverse().expect("positive definite") * sigma2;
    println!("sample covariance vs sigma^2 (D - rho W)^-1:");
    for i in 0..3 {
        println!(
            "  {:>7.4} {:>7.4} {:>7.4}   | {:>7.4} {:>7.4} {:>7.4}",
            cov[i][0],
            cov[i][1],
            cov[i][2],
            exact[(i, 0)],
            exact[(i, 1)],
            exact[(i, 2)]
        );
    }

    let y = simulate_responses(
        &tri,
        &Design::new(vec![1, 1, -1])?,
        CarParams::new(0.0, 2.0, rho, sigma2)?,
        5,
    )?;
    println!("responses: {y:?}");
    Ok(())
}
