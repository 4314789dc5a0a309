//! Monte-Carlo protocol for the empirical variance of the treatment estimate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::car::{empirical_variance, ols_fit, CarParams, ProfileLikelihood, ResponseSimulator};
use crate::criteria::{random_design, Design};
use crate::error::{Error, Result};
use crate::netgraph::Network;
use crate::rng::{derive_seed, substream};

/// Largest tolerated fraction of failed replicate fits.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// Default number of replicates per design.
pub const DEFAULT_REPS: usize = 500;

/// Default number of random designs averaged over.
pub const DEFAULT_RANDOM_DESIGNS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Profile maximum likelihood under the CAR model.
    Car,
    /// Ordinary least squares.
    Lm,
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Estimator::Car => "car",
            Estimator::Lm => "lm",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StudyOptions {
    pub reps: usize,
    pub estimator: Estimator,
    pub seed: u64,
    /// Drop the CAR noise so every replicate returns the mean response.
    pub noiseless: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            reps: DEFAULT_REPS,
            estimator: Estimator::Car,
            seed: 0,
            noiseless: false,
        }
    }
}

/// Replicate estimates for one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceStudy {
    /// `β̂` per replicate; `None` where the fit failed.
    pub estimates: Vec<Option<f64>>,
    pub failures: usize,
    pub variance: f64,
}

impl VarianceStudy {
    pub fn successful(&self) -> Vec<f64> {
        self.estimates.iter().flatten().copied().collect()
    }
}

/// Simulates `reps` response vectors under `params`, fits each and returns
/// the sample variance of `β̂`. Replicate `r` draws from substream `r` of
/// `seed`, so results do not depend on the thread count.
pub fn variance_study(net: &Network, design: &Design, params: CarParams, opts: &StudyOptions) -> Result<VarianceStudy> {
    if opts.reps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 replicates, got {}",
            opts.reps
        )));
    }
    design.check_len(net.n())?;
    let sim = if opts.noiseless {
        ResponseSimulator::noiseless(net, params)?
    } else {
        ResponseSimulator::new(net, params)?
    };
    let profile = ProfileLikelihood::new(net);
    let estimates: Vec<Option<f64>> = (0..opts.reps)
        .into_par_iter()
        .map(|rep| {
            let y = sim.draw(design, &mut substream(opts.seed, rep as u64)).ok()?;
            match opts.estimator {
                Estimator::Car => profile.fit(design, &y).ok().map(|f| f.beta_hat),
                Estimator::Lm => ols_fit(design, &y).ok().map(|(_, b)| b),
            }
        })
        .collect();
    let failures = estimates.iter().filter(|e| e.is_none()).count();
    if failures as f64 > MAX_FAILURE_RATE * opts.reps as f64 {
        return Err(Error::Estimation(format!(
            "{failures} of {} replicate fits failed",
            opts.reps
        )));
    }
    let ok: Vec<f64> = estimates.iter().flatten().copied().collect();
    let variance = empirical_variance(&ok)?;
    Ok(VarianceStudy {
        estimates,
        failures,
        variance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomDesignStudy {
    pub designs: Vec<Design>,
    pub studies: Vec<VarianceStudy>,
    /// Mean of the per-design variances.
    pub mean_variance: f64,
}

/// Random fair-coin design number `k` for a master seed; designs that use a
/// single level are redrawn.
pub fn nth_random_design(n: usize, seed: u64, k: u64) -> Result<Design> {
    let mut attempt = 0u64;
    loop {
        let d = random_design(n, derive_seed(derive_seed(seed, k), attempt))?;
        if d.has_both_levels() {
            return Ok(d);
        }
        attempt += 1;
    }
}

/// Averages the replicate variance over `designs` independent random designs.
pub fn random_design_study(
    net: &Network,
    params: CarParams,
    designs: usize,
    opts: &StudyOptions,
) -> Result<RandomDesignStudy> {
    if designs == 0 {
        return Err(Error::InvalidParameter("need at least one random design".into()));
    }
    let design_seed = derive_seed(opts.seed, u64::MAX);
    let mut out = Vec::with_capacity(designs);
    let mut studies = Vec::with_capacity(designs);
    for k in 0..designs {
        let d = nth_random_design(net.n(), design_seed, k as u64)?;
        let study = variance_study(
            net,
            &d,
            params,
            &StudyOptions {
                seed: derive_seed(opts.seed, k as u64),
                ..*opts
            },
        )?;
        out.push(d);
        studies.push(study);
    }
    let mean_variance = studies.iter().map(|s| s.variance).sum::<f64>() / designs as f64;
    Ok(RandomDesignStudy {
        designs: out,
        studies,
        mean_variance,
    })
}
