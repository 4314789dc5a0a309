//! GLS with known rho, OLS, and the profile-likelihood fit of all parameters.
//!
//! ```bash
//! cargo run --release --example estimation
//! ```

use netdesign::car::{gls_fit, ols_fit, profile_mle, simulate_noiseless, simulate_responses, CarParams};
use netdesign::netgraph::generate_random;
use netdesign::simulation::nth_random_design;

fn main() -> netdesign::Result<()> {
    let net = generate_random(50, 0.1, 7)?;
    let x = nth_random_design(net.n(), 3, 0)?;
    let truth = CarParams::new(1.0, 2.0, 0.2, 1.0)?;

    let y = simulate_noiseless(&net, &x, truth)?;
    println!("noise-free GLS at rho=0.5: {:?}", gls_fit(&net, &x, &y, 0.5)?);

    println!("rep,beta_gls,beta_ols,rho_hat,sigma2_hat");
    for rep in 0..10 {
        let y = simulate_responses(&net, &x, truth, rep)?;
        let fit = profile_mle(&net, &x, &y)?;
        println!(
            "{rep},{:.4},{:.4},{:.3},{:.3}",
            gls_fit(&net, &x, &y, truth.rho)?.1,
            ols_fit(&x, &y)?.1,
            fit.rho_hat.unwrap_or(f64::NAN),
            fit.sigma2_hat
        );
    }
    Ok(())
}
