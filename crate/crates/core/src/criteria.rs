//! D-optimality mathematics for two-level designs under the CAR model.
//!
//! All double sums over the adjacency matrix run over ordered pairs, so each
//! undirected edge contributes twice to `ΣΣ w_ij x_i x_j`.

use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::car::check_rho;
use crate::error::{Error, Result};
use crate::netgraph::Network;
use crate::rng;

/// A treatment allocation: `+1` for arm A, `-1` for arm B.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Design(Vec<i8>);

impl Design {
    pub fn new(x: Vec<i8>) -> Result<Self> {
        if let Some(pos) = x.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter(format!(
                "design entry {pos} is {}, expected -1 or 1",
                x[pos]
            )));
        }
        Ok(Self(x))
    }

    /// Every entry set to `level` (which must be ±1).
    pub fn constant(n: usize, level: i8) -> Result<Self> {
        Self::new(vec![level; n])
    }

    /// Design from 0/1 indicators, `v_i = (x_i + 1) / 2`.
    pub fn from_indicators(v: &[bool]) -> Self {
        Self(v.iter().map(|&b| if b { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| f64::from(v)).collect()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&v| -v).collect())
    }

    /// Representative of `{x, -x}` with `x_0 = +1`.
    pub fn canonical(&self) -> Self {
        match self.0.first() {
            Some(-1) => self.negated(),
            _ => self.clone(),
        }
    }

    /// True when both levels occur.
    pub fn has_both_levels(&self) -> bool {
        self.0.contains(&1) && self.0.contains(&-1)
    }

    pub fn count_positive(&self) -> usize {
        self.0.iter().filter(|&&v| v == 1).count()
    }

    /// `Σ m_i x_i`.
    pub fn degree_imbalance(&self, net: &Network) -> i64 {
        net.degrees()
            .iter()
            .zip(&self.0)
            .map(|(&m, &x)| m as i64 * i64::from(x))
            .sum()
    }

    /// `ΣΣ w_ij x_i x_j` over ordered pairs.
    pub fn neighbor_agreement(&self, net: &Network) -> i64 {
        2 * net.edges().map(|(i, j)| i64::from(self.0[i] * self.0[j])).sum::<i64>()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.len(),
            });
        }
        Ok(())
    }

    /// `node_id,assignment` CSV using the network's node labels.
    pub fn to_csv(&self, net: &Network) -> Result<String> {
        self.check_len(net.n())?;
        let mut out = String::from("node_id,assignment\n");
        for (i, &x) in self.0.iter().enumerate() {
            let _ = writeln!(out, "{},{}", net.label(i), x);
        }
        Ok(out)
    }

    /// Parses a `node_id,assignment` CSV and orders entries by the network's
    /// node labels. Every node must appear exactly once.
    pub fn from_csv(text: &str, net: &Network) -> Result<Self> {
        let index: std::collections::HashMap<String, usize> = (0..net.n()).map(|i| (net.label(i), i)).collect();
        let mut x = vec![0i8; net.n()];
        let mut seen = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("node_id")) {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let (id, value) = line
                .split_once(',')
                .ok_or_else(|| parse_err(format!("expected `node_id,assignment`, found `{line}`")))?;
            let &i = index
                .get(id.trim())
                .ok_or_else(|| parse_err(format!("unknown node `{}`", id.trim())))?;
            let v: i8 = value
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad assignment `{}`", value.trim())))?;
            if v != 1 && v != -1 {
                return Err(parse_err(format!("assignment must be -1 or 1, got {v}")));
            }
            if x[i] != 0 {
                return Err(parse_err(format!("node `{}` listed twice", id.trim())));
            }
            x[i] = v;
            seen += 1;
        }
        if seen != net.n() {
            return Err(Error::DimensionMismatch {
                expected: net.n(),
                actual: seen,
            });
        }
        Self::new(x)
    }
}

impl TryFrom<Vec<i8>> for Design {
    type Error = Error;

    fn try_from(x: Vec<i8>) -> Result<Self> {
        Self::new(x)
    }
}

impl From<Design> for Vec<i8> {
    fn from(d: Design) -> Self {
        d.0
    }
}

/// Summary of a design's quality at one value of `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub d_value: f64,
    pub upper_bound: f64,
    pub efficiency: f64,
    /// `Var(beta_hat) / sigma^2`; infinite for a single-level design.
    pub beta_variance_over_sigma2: f64,
    pub rho_used: f64,
}

/// `D(x) = det(Xᵀ(D − ρW)X)` in closed form.
pub fn d_value(net: &Network, design: &Design, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    design.check_len(net.n())?;
    if !design.has_both_levels() {
        return Ok(0.0);
    }
    let m_sum = net.degree_sum();
    let agreement = design.neighbor_agreement(net) as f64;
    let imbalance = design.degree_imbalance(net) as f64;
    let one_minus = 1.0 - rho;
    let d = one_minus * m_sum * (m_sum - rho * agreement) - one_minus * one_minus * imbalance * imbalance;
    Ok(d.max(0.0))
}

/// `Var(beta_hat) = σ²(1 − ρ)Σm / D(x)`.
pub fn beta_variance(net: &Network, design: &Design, rho: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    let d = d_value(net, design, rho)?;
    if d <= 0.0 {
        return Err(Error::SingularDesign(
            "every node receives the same treatment, so the effect is confounded with the intercept".into(),
        ));
    }
    Ok(sigma2 * (1.0 - rho) * net.degree_sum() / d)
}

/// Upper bound of `D(x)` over all designs.
pub fn d_upper_bound(net: &Network, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let m_sum = net.degree_sum();
    // ΣΣ w_ij over ordered pairs equals Σ m_i.
    let w_sum = 2.0 * net.edge_count() as f64;
    Ok((1.0 - rho) * m_sum * m_sum + (1.0 - rho) * rho * m_sum * w_sum)
}

/// `D(x)` divided by its upper bound; no root is taken since there is a single factor.
pub fn d_efficiency(net: &Network, design: &Design, rho: f64) -> Result<f64> {
    Ok(d_value(net, design, rho)? / d_upper_bound(net, rho)?)
}

/// The minimization objective `a ΣΣ w_ij x_i x_j + (Σ m_i x_i)²` with
/// `a = ρ/(1 − ρ) Σ m_i`, whose minimizers are exactly the maximizers of `D(x)`.
pub fn prop1_objective(net: &Network, design: &Design, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    design.check_len(net.n())?;
    let a = agreement_weight(net, rho);
    let imbalance = design.degree_imbalance(net) as f64;
    Ok(a * design.neighbor_agreement(net) as f64 + imbalance * imbalance)
}

/// `a = ρ/(1 − ρ) Σ m_i`.
pub fn agreement_weight(net: &Network, rho: f64) -> f64 {
    rho / (1.0 - rho) * net.degree_sum()
}

/// Expected D-efficiency of an i.i.d. fair-coin design.
pub fn expected_random_efficiency(net: &Network, rho: f64) -> Result<f64> {
    let bound = d_upper_bound(net, rho)?;
    let m_sum = net.degree_sum();
    let numerator = (1.0 - rho) * m_sum * m_sum - (1.0 - rho).powi(2) * net.degree_square_sum();
    Ok(numerator / bound)
}

/// Independent fair-coin allocation.
pub fn random_design(n: usize, seed: u64) -> Result<Design> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let mut rng = rng::rng_from_seed(seed);
    Ok(Design((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()))
}

pub fn evaluate(net: &Network, design: &Design, rho: f64) -> Result<EfficiencyReport> {
    let d = d_value(net, design, rho)?;
    let upper_bound = d_upper_bound(net, rho)?;
    let beta_variance_over_sigma2 = if d > 0.0 {
        (1.0 - rho) * net.degree_sum() / d
    } else {
        f64::INFINITY
    };
    Ok(EfficiencyReport {
        d_value: d,
        upper_bound,
        efficiency: d / upper_bound,
        beta_variance_over_sigma2,
        rho_used: rho,
    })
}
