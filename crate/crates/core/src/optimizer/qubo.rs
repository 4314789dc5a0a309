//! Quadratic objectives over `x ∈ {−1, +1}ⁿ`.

use serde::{Deserialize, Serialize};

use crate::car::check_rho;
use crate::criteria::{agreement_weight, Design};
use crate::error::{Error, Result};
use crate::netgraph::Network;

/// `constant + Σ_{i<j} q_ij x_i x_j`.
///
/// The pair list is complete: every nonzero coefficient appears once with
/// `i < j`. When the objective was generated from a network, `split` records
/// the decomposition `sparse part + (Σ g_i x_i)²` that the solvers use for
/// fast incremental updates and tighter bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadObjective {
    pub n: usize,
    pub pairs: Vec<(usize, usize, f64)>,
    pub constant: f64,
    /// `a = ρ/(1 − ρ) Σ m_i` for objectives built from a correlation value.
    pub a_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitForm>,
}

/// `objective(x) = constant + Σ sparse q_ij x_i x_j + (Σ g_i x_i)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitForm {
    pub constant: f64,
    pub sparse: Vec<(usize, usize, f64)>,
    pub weights: Vec<f64>,
}

impl QuadObjective {
    /// Objective from explicit pair coefficients. Zero coefficients are dropped
    /// and repeated pairs are summed.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize, f64)], constant: f64) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for &(i, j, q) in pairs {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidParameter(format!("bad pair ({i}, {j}) for n={n}")));
            }
            if !q.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite coefficient on ({i}, {j})")));
            }
            *map.entry((i.min(j), i.max(j))).or_insert(0.0) += q;
        }
        Ok(Self {
            n,
            pairs: map
                .into_iter()
                .filter(|&(_, q)| q != 0.0)
                .map(|((i, j), q)| (i, j, q))
                .collect(),
            constant,
            a_value: None,
            split: None,
        })
    }

    pub fn value(&self, design: &Design) -> f64 {
        let x = design.values();
        self.constant
            + self
                .pairs
                .iter()
                .map(|&(i, j, q)| q * f64::from(x[i] * x[j]))
                .sum::<f64>()
    }

    /// `b_ij = q_ij / 2`, the coefficient per ordered pair.
    pub fn b_coefficient(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.pairs
            .iter()
            .find(|&&(a, b, _)| (a, b) == key)
            .map_or(0.0, |&(_, _, q)| q / 2.0)
    }

    /// `constant − Σ |q_ij|`, valid for every `x ∈ {±1}ⁿ`.
    pub fn trivial_lower_bound(&self) -> f64 {
        self.constant - self.pairs.iter().map(|&(_, _, q)| q.abs()).sum::<f64>()
    }
}

/// Objective whose minimizers maximize `D(x)`:
/// `a ΣΣ w_ij x_i x_j + (Σ m_i x_i)² = Σ m_i² + Σ_{i<j} 2 b_ij x_i x_j`
/// with `b_ij = a w_ij + m_i m_j`.
pub fn build_original_qubo(net: &Network, rho: f64) -> Result<QuadObjective> {
    check_rho(rho)?;
    let a = agreement_weight(net, rho);
    let m = net.degrees();
    let n = net.n();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = if net.has_edge(i, j) { a } else { 0.0 };
            let q = 2.0 * (w + (m[i] * m[j]) as f64);
            if q != 0.0 {
                pairs.push((i, j, q));
            }
        }
    }
    let sparse = if a > 0.0 {
        net.edges().map(|(i, j)| (i, j, 2.0 * a)).collect()
    } else {
        Vec::new()
    };
    Ok(QuadObjective {
        n,
        pairs,
        constant: net.degree_square_sum(),
        a_value: Some(a),
        split: Some(SplitForm {
            constant: 0.0,
            sparse,
            weights: m.iter().map(|&v| v as f64).collect(),
        }),
    })
}

/// Edge-only objective `ΣΣ w_ij x_i x_j`, independent of ρ.
pub fn build_modified_qubo(net: &Network) -> QuadObjective {
    QuadObjective {
        n: net.n(),
        pairs: net.edges().map(|(i, j)| (i, j, 2.0)).collect(),
        constant: 0.0,
        a_value: None,
        split: None,
    }
}

/// Constraint `|Σ w_i x_i| ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Balance {
    pub weights: Vec<i64>,
    pub bound: f64,
}

impl Balance {
    pub fn new(weights: Vec<i64>, bound: f64) -> Result<Self> {
        if !(bound >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "balance bound must be non-negative, got {bound}"
            )));
        }
        Ok(Self { weights, bound })
    }

    /// Degree-weighted balance `|Σ m_i x_i| ≤ bound`.
    pub fn for_network(net: &Network, bound: f64) -> Result<Self> {
        Self::new(net.degrees().iter().map(|&m| m as i64).collect(), bound)
    }

    /// Degree-weighted balance with the bound calibrated from `alpha`.
    pub fn calibrated(net: &Network, alpha: f64) -> Result<Self> {
        Self::for_network(net, super::calibrate_balance_bound(net, alpha)?)
    }

    pub fn value(&self, design: &Design) -> i64 {
        self.weights
            .iter()
            .zip(design.values())
            .map(|(&w, &x)| w * i64::from(x))
            .sum()
    }

    pub fn admits(&self, value: i64) -> bool {
        (value as f64).abs() <= self.bound
    }

    pub fn is_satisfied(&self, design: &Design) -> bool {
        self.admits(self.value(design))
    }
}
