//! The conditional auto-regressive outcome model
//! `y_i = β₀ + x_i β + δ_i`, `δ ~ MVN(0, σ²(D − ρW)⁻¹)`,
//! with exact sampling, GLS/OLS estimation and profile-likelihood fitting of ρ.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::criteria::Design;
use crate::error::{Error, Result};
use crate::netgraph::Network;
use crate::rng::{self, Rng};

/// Upper margin of the ρ search interval `[0, 1 − ε]`.
pub const RHO_MARGIN: f64 = 1e-4;
/// Points in the coarse ρ grid before golden-section refinement.
pub const RHO_GRID_POINTS: usize = 21;
const GOLDEN_TOL: f64 = 1e-7;

/// Validates `0 ≤ ρ < 1`.
pub fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "correlation parameter must lie in [0, 1), got {rho}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarParams {
    pub beta0: f64,
    pub beta: f64,
    pub rho: f64,
    pub sigma2: f64,
}

impl CarParams {
    pub fn new(beta0: f64, beta: f64, rho: f64, sigma2: f64) -> Result<Self> {
        let p = Self {
            beta0,
            beta,
            rho,
            sigma2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_rho(self.rho)?;
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        if !(self.beta0.is_finite() && self.beta.is_finite()) {
            return Err(Error::InvalidParameter("regression coefficients must be finite".into()));
        }
        Ok(())
    }
}

impl Default for CarParams {
    fn default() -> Self {
        Self {
            beta0: 0.0,
            beta: 2.0,
            rho: 0.2,
            sigma2: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub beta0_hat: f64,
    pub beta_hat: f64,
    /// `None` for least-squares fits.
    pub rho_hat: Option<f64>,
    pub sigma2_hat: f64,
    pub loglik: f64,
}

/// `D − ρW` as a dense matrix.
pub fn precision_matrix(net: &Network, rho: f64) -> Result<DMatrix<f64>> {
    check_rho(rho)?;
    let n = net.n();
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        q[(i, i)] = net.degree(i) as f64;
        for &j in net.neighbors(i) {
            q[(i, j)] = -rho;
        }
    }
    Ok(q)
}

/// `(D − ρW) v` using the neighbor lists.
fn precision_times(net: &Network, rho: f64, v: &[f64]) -> Vec<f64> {
    (0..net.n())
        .map(|i| {
            let nb: f64 = net.neighbors(i).iter().map(|&j| v[j]).sum();
            net.degree(i) as f64 * v[i] - rho * nb
        })
        .collect()
}

fn cholesky(net: &Network, rho: f64) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    precision_matrix(net, rho)?
        .cholesky()
        .ok_or_else(|| Error::Factorization(format!("D - rho W is not positive definite at rho={rho}")))
}

/// `log|D − ρW|` from the Cholesky factor.
pub fn log_det_precision(net: &Network, rho: f64) -> Result<f64> {
    let l = cholesky(net, rho)?;
    Ok(2.0 * l.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// Exact sampler for `δ ~ MVN(0, σ²(D − ρW)⁻¹)`.
///
/// With `D − ρW = LLᵀ`, `δ = σ L⁻ᵀ z` for standard normal `z` has covariance
/// `σ²(LLᵀ)⁻¹`. The factor is computed once and reused across draws.
pub struct CarSampler {
    upper: DMatrix<f64>,
    scale: f64,
}

impl CarSampler {
    pub fn new(net: &Network, rho: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        let l = cholesky(net, rho)?;
        Ok(Self {
            upper: l.l().transpose(),
            scale: sigma2.sqrt(),
        })
    }

    pub fn dim(&self) -> usize {
        self.upper.nrows()
    }

    pub fn draw(&self, rng: &mut Rng) -> Vec<f64> {
        let z = DVector::from_iterator(self.dim(), (0..self.dim()).map(|_| StandardNormal.sample(rng)));
        let delta = self
            .upper
            .solve_upper_triangular(&z)
            .expect("Cholesky factor has a positive diagonal");
        delta.iter().map(|v| v * self.scale).collect()
    }
}

/// One draw of the CAR noise vector.
pub fn sample_delta(net: &Network, rho: f64, sigma2: f64, seed: u64) -> Result<Vec<f64>> {
    let sampler = CarSampler::new(net, rho, sigma2)?;
    Ok(sampler.draw(&mut rng::rng_from_seed(seed)))
}

/// Generates responses for a fixed network and parameter set.
pub struct ResponseSimulator {
    params: CarParams,
    sampler: Option<CarSampler>,
    n: usize,
}

impl ResponseSimulator {
    pub fn new(net: &Network, params: CarParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            sampler: Some(CarSampler::new(net, params.rho, params.sigma2)?),
            n: net.n(),
        })
    }

    /// Simulator with `δ ≡ 0`, returning the mean response exactly.
    pub fn noiseless(net: &Network, params: CarParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            sampler: None,
            n: net.n(),
        })
    }

    pub fn draw(&self, design: &Design, rng: &mut Rng) -> Result<Vec<f64>> {
        design.check_len(self.n)?;
        let mut y: Vec<f64> = design
            .values()
            .iter()
            .map(|&x| self.params.beta0 + f64::from(x) * self.params.beta)
            .collect();
        if let Some(sampler) = &self.sampler {
            for (yi, d) in y.iter_mut().zip(sampler.draw(rng)) {
                *yi += d;
            }
        }
        Ok(y)
    }
}

pub fn simulate_responses(net: &Network, design: &Design, params: CarParams, seed: u64) -> Result<Vec<f64>> {
    ResponseSimulator::new(net, params)?.draw(design, &mut rng::rng_from_seed(seed))
}

pub fn simulate_noiseless(net: &Network, design: &Design, params: CarParams) -> Result<Vec<f64>> {
    ResponseSimulator::noiseless(net, params)?.draw(design, &mut rng::rng_from_seed(0))
}

fn require_levels(design: &Design) -> Result<()> {
    if !design.has_both_levels() {
        return Err(Error::SingularDesign(
            "design uses a single treatment level, so the effect is confounded with the intercept".into(),
        ));
    }
    Ok(())
}

/// Solves `[[a, b], [b, c]] (u, v)ᵀ = (r, s)ᵀ`.
fn solve_2x2(a: f64, b: f64, c: f64, r: f64, s: f64) -> Result<(f64, f64)> {
    let det = a * c - b * b;
    if !(det > 1e-12 * (a * c).abs()) {
        return Err(Error::SingularDesign("information matrix XᵀVX is singular".into()));
    }
    Ok(((c * r - b * s) / det, (a * s - b * r) / det))
}

struct GlsSolution {
    beta0: f64,
    beta: f64,
    /// `rᵀ(D − ρW)r` for the residual `r`.
    quad_form: f64,
}

fn gls_solve(net: &Network, x: &[f64], y: &[f64], rho: f64) -> Result<GlsSolution> {
    let ones = vec![1.0; x.len()];
    let q1 = precision_times(net, rho, &ones);
    let qx = precision_times(net, rho, x);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let (beta0, beta) = solve_2x2(dot(&ones, &q1), dot(&ones, &qx), dot(x, &qx), dot(&q1, y), dot(&qx, y))?;
    let r: Vec<f64> = y.iter().zip(x).map(|(yi, xi)| yi - beta0 - beta * xi).collect();
    let quad_form = dot(&r, &precision_times(net, rho, &r));
    Ok(GlsSolution { beta0, beta, quad_form })
}

fn check_inputs(net: &Network, design: &Design, y: &[f64]) -> Result<()> {
    design.check_len(net.n())?;
    if y.len() != net.n() {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            actual: y.len(),
        });
    }
    require_levels(design)
}

/// Generalized least squares `(XᵀQX)⁻¹XᵀQy` with `Q = D − ρW`.
pub fn gls_fit(net: &Network, design: &Design, y: &[f64], rho: f64) -> Result<(f64, f64)> {
    check_rho(rho)?;
    check_inputs(net, design, y)?;
    let s = gls_solve(net, &design.as_f64(), y, rho)?;
    Ok((s.beta0, s.beta))
}

/// Ordinary least squares on `(1, x_i)`.
pub fn ols_fit(design: &Design, y: &[f64]) -> Result<(f64, f64)> {
    if y.len() != design.len() {
        return Err(Error::DimensionMismatch {
            expected: design.len(),
            actual: y.len(),
        });
    }
    require_levels(design)?;
    let n = y.len() as f64;
    let x = design.as_f64();
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    // Σ x_i² = n for ±1 entries.
    solve_2x2(n, sx, n, sy, sxy)
}

/// OLS fit packaged as a [`FitResult`] with the ML variance estimate.
pub fn ols_fit_result(design: &Design, y: &[f64]) -> Result<FitResult> {
    let (beta0_hat, beta_hat) = ols_fit(design, y)?;
    let n = y.len() as f64;
    let rss: f64 = y
        .iter()
        .zip(design.values())
        .map(|(yi, &x)| (yi - beta0_hat - beta_hat * f64::from(x)).powi(2))
        .sum();
    let sigma2_hat = rss / n;
    Ok(FitResult {
        beta0_hat,
        beta_hat,
        rho_hat: None,
        sigma2_hat,
        loglik: -0.5 * n * ((2.0 * std::f64::consts::PI * sigma2_hat).ln() + 1.0),
    })
}

/// Gaussian log density of `y` under the CAR model with the given parameters.
pub fn log_density(net: &Network, design: &Design, y: &[f64], params: &CarParams) -> Result<f64> {
    params.validate()?;
    design.check_len(net.n())?;
    if y.len() != net.n() {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            actual: y.len(),
        });
    }
    let r: Vec<f64> = y
        .iter()
        .zip(design.values())
        .map(|(yi, &x)| yi - params.beta0 - params.beta * f64::from(x))
        .collect();
    let quad: f64 = r
        .iter()
        .zip(precision_times(net, params.rho, &r))
        .map(|(a, b)| a * b)
        .sum();
    let n = net.n() as f64;
    Ok(
        -0.5 * n * (2.0 * std::f64::consts::PI * params.sigma2).ln() + 0.5 * log_det_precision(net, params.rho)?
            - quad / (2.0 * params.sigma2),
    )
}

/// Profiled CAR likelihood for one network.
///
/// For fixed ρ the regression coefficients are the GLS estimates and
/// `σ̂²(ρ) = rᵀ(D − ρW)r / n`. Log-determinants are memoized by ρ, so a single
/// instance can be shared across many replicate fits on the same network.
pub struct ProfileLikelihood<'a> {
    net: &'a Network,
    log_dets: Mutex<HashMap<u64, f64>>,
}

/// Profiled quantities at one value of ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub rho: f64,
    pub beta0: f64,
    pub beta: f64,
    pub sigma2: f64,
    pub loglik: f64,
}

impl<'a> ProfileLikelihood<'a> {
    pub fn new(net: &'a Network) -> Self {
        Self {
            net,
            log_dets: Mutex::new(HashMap::new()),
        }
    }

    fn log_det(&self, rho: f64) -> Result<f64> {
        let key = rho.to_bits();
        if let Some(&v) = self.log_dets.lock().expect("poisoned cache").get(&key) {
            return Ok(v);
        }
        let v = log_det_precision(self.net, rho)?;
        self.log_dets.lock().expect("poisoned cache").insert(key, v);
        Ok(v)
    }

    /// Profiled log-likelihood (full Gaussian constant included).
    pub fn evaluate(&self, x: &[f64], y: &[f64], rho: f64) -> Result<ProfilePoint> {
        check_rho(rho)?;
        let s = gls_solve(self.net, x, y, rho)?;
        let n = self.net.n() as f64;
        let sigma2 = s.quad_form / n;
        if !(sigma2 > 0.0) {
            return Err(Error::Estimation(
                "residuals vanish; the likelihood is unbounded".into(),
            ));
        }
        let loglik =
            0.5 * self.log_det(rho)? - 0.5 * n * sigma2.ln() - 0.5 * n * (1.0 + (2.0 * std::f64::consts::PI).ln());
        Ok(ProfilePoint {
            rho,
            beta0: s.beta0,
            beta: s.beta,
            sigma2,
            loglik,
        })
    }

    /// Maximizes the profile over `[0, 1 − ε]`: coarse grid, then golden-section
    /// search inside the bracket around the best grid point. Noise-free
    /// responses return the exact coefficients with `rho_hat = None`.
    pub fn fit(&self, design: &Design, y: &[f64]) -> Result<FitResult> {
        check_inputs(self.net, design, y)?;
        let x = design.as_f64();
        // An exact fit identifies the coefficients but not ρ.
        let exact = gls_solve(self.net, &x, y, 0.0)?;
        if exact.quad_form <= 1e-24 * y.iter().map(|v| v * v).sum::<f64>().max(1.0) {
            return Ok(FitResult {
                beta0_hat: exact.beta0,
                beta_hat: exact.beta,
                rho_hat: None,
                sigma2_hat: 0.0,
                loglik: f64::INFINITY,
            });
        }
        let hi = 1.0 - RHO_MARGIN;
        let grid: Vec<f64> = (0..RHO_GRID_POINTS)
            .map(|k| hi * k as f64 / (RHO_GRID_POINTS - 1) as f64)
            .collect();
        let mut best = self.evaluate(&x, y, grid[0])?;
        let mut best_k = 0;
        for (k, &rho) in grid.iter().enumerate().skip(1) {
            let p = self.evaluate(&x, y, rho)?;
            if p.loglik > best.loglik {
                best = p;
                best_k = k;
            }
        }
        let (mut a, mut b) = (
            grid[best_k.saturating_sub(1)],
            grid[(best_k + 1).min(RHO_GRID_POINTS - 1)],
        );
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.evaluate(&x, y, c)?;
        let mut fd = self.evaluate(&x, y, d)?;
        while b - a > GOLDEN_TOL {
            if fc.loglik >= fd.loglik {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.evaluate(&x, y, c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.evaluate(&x, y, d)?;
            }
        }
        for p in [fc, fd] {
            if p.loglik > best.loglik {
                best = p;
            }
        }
        Ok(FitResult {
            beta0_hat: best.beta0,
            beta_hat: best.beta,
            rho_hat: Some(best.rho),
            sigma2_hat: best.sigma2,
            loglik: best.loglik,
        })
    }
}

/// Maximum-likelihood fit of `(β₀, β, ρ, σ²)` by profiling out everything but ρ.
pub fn profile_mle(net: &Network, design: &Design, y: &[f64]) -> Result<FitResult> {
    ProfileLikelihood::new(net).fit(design, y)
}

/// Unbiased sample variance (divisor `L − 1`).
pub fn empirical_variance(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two estimates, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Ok(values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

/// `node_id,y` CSV.
pub fn responses_csv(net: &Network, y: &[f64]) -> String {
    let mut out = String::from("node_id,y\n");
    for (i, v) in y.iter().enumerate() {
        let _ = writeln!(out, "{},{v}", net.label(i));
    }
    out
}

/// `rep,beta_hat` CSV.
pub fn estimates_csv(estimates: &[f64]) -> String {
    let mut out = String::from("rep,beta_hat\n");
    for (rep, v) in estimates.iter().enumerate() {
        let _ = writeln!(out, "{rep},{v}");
    }
    out
}
