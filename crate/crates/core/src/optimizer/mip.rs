//! Linearized mixed-integer form of a quadratic design objective.
//!
//! With `v_i = (x_i + 1)/2` and `u_ij = v_i v_j` the quadratic objective
//! becomes `min Σ_{i≠j} b_ij u_ij − Σ_{i≠j} b_ij v_i` subject to
//! `u_ij ≤ v_i`, `u_ij ≤ v_j`, `u_ij ≥ v_i + v_j − 1`, `u_ij ≥ 0` and
//! `v_i ∈ {0, 1}`, optionally with `½(Σw − Δ) ≤ Σ w_i v_i ≤ ½(Σw + Δ)`.
//! Because `u_ij = u_ji`, each unordered pair carries one variable with
//! coefficient `2 b_ij = q_ij`. The ±1 objective equals
//! `scale · mip + offset`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::qubo::{Balance, QuadObjective};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductVar {
    pub i: usize,
    pub j: usize,
    /// Objective coefficient of `u_ij`.
    pub coef: f64,
}

/// `lower ≤ Σ w_i v_i ≤ upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceRows {
    pub weights: Vec<i64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizedMip {
    pub n: usize,
    pub products: Vec<ProductVar>,
    /// Objective coefficient of each binary `v_i`.
    pub v_coefs: Vec<f64>,
    pub balance: Option<BalanceRows>,
    pub scale: f64,
    pub offset: f64,
}

/// Emits the linearized program for `obj`, with the balance rows when given.
/// Zero-coefficient pairs get no product variable.
pub fn build_linearized_mip(obj: &QuadObjective, balance: Option<&Balance>) -> Result<LinearizedMip> {
    let n = obj.n;
    let mut v_coefs = vec![0.0; n];
    let mut products = Vec::with_capacity(obj.pairs.len());
    let mut q_sum = 0.0;
    for &(i, j, q) in &obj.pairs {
        if q == 0.0 {
            continue;
        }
        products.push(ProductVar { i, j, coef: q });
        // −Σ_{j≠i} b_ij v_i with b = q/2.
        v_coefs[i] -= q / 2.0;
        v_coefs[j] -= q / 2.0;
        q_sum += q;
    }
    let balance = match balance {
        Some(b) => {
            if b.weights.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: b.weights.len(),
                });
            }
            let total: i64 = b.weights.iter().sum();
            Some(BalanceRows {
                weights: b.weights.clone(),
                lower: 0.5 * (total as f64 - b.bound),
                upper: 0.5 * (total as f64 + b.bound),
            })
        }
        None => None,
    };
    Ok(LinearizedMip {
        n,
        products,
        v_coefs,
        balance,
        scale: 4.0,
        offset: obj.constant + q_sum,
    })
}

impl LinearizedMip {
    pub fn num_binary(&self) -> usize {
        self.n
    }

    pub fn num_continuous(&self) -> usize {
        self.products.len()
    }

    pub fn num_constraints(&self) -> usize {
        3 * self.products.len() + if self.balance.is_some() { 2 } else { 0 }
    }

    pub fn objective(&self, v: &[bool], u: &[f64]) -> f64 {
        let lin: f64 = self.v_coefs.iter().zip(v).map(|(c, &b)| if b { *c } else { 0.0 }).sum();
        lin + self.products.iter().zip(u).map(|(p, uv)| p.coef * uv).sum::<f64>()
    }

    /// Value of the ±1 objective corresponding to a MIP objective value.
    pub fn to_quadratic_value(&self, mip_value: f64) -> f64 {
        self.scale * mip_value + self.offset
    }

    pub fn is_feasible(&self, v: &[bool], u: &[f64]) -> bool {
        const EPS: f64 = 1e-9;
        let vf = |i: usize| -> f64 {
            if v[i] {
                1.0
            } else {
                0.0
            }
        };
        let rows_ok = self.products.iter().zip(u).all(|(p, &uv)| {
            uv >= -EPS && uv <= vf(p.i) + EPS && uv <= vf(p.j) + EPS && uv >= vf(p.i) + vf(p.j) - 1.0 - EPS
        });
        let balance_ok = self.balance.as_ref().is_none_or(|b| {
            let s: i64 = b.weights.iter().zip(v).filter(|(_, &x)| x).map(|(w, _)| *w).sum();
            let s = s as f64;
            s >= b.lower - EPS && s <= b.upper + EPS
        });
        rows_ok && balance_ok
    }

    /// Optimal continuous part for fixed binaries: each `u_ij` sits at the end
    /// of its feasible interval `[max(0, v_i + v_j − 1), min(v_i, v_j)]`
    /// favoured by the sign of its coefficient.
    pub fn optimal_products(&self, v: &[bool]) -> Vec<f64> {
        let vf = |i: usize| -> f64 {
            if v[i] {
                1.0
            } else {
                0.0
            }
        };
        self.products
            .iter()
            .map(|p| {
                let lo = (vf(p.i) + vf(p.j) - 1.0).max(0.0);
                let hi = vf(p.i).min(vf(p.j));
                if p.coef > 0.0 {
                    lo
                } else {
                    hi
                }
            })
            .collect()
    }

    /// CPLEX LP text. The affine map back to the ±1 objective is recorded in
    /// the leading comment.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\ linearized design objective");
        let _ = writeln!(
            out,
            "\\ quadratic objective = {} * (objective) + {}",
            self.scale, self.offset
        );
        out.push_str("Minimize\n obj:");
        let mut first = true;
        let mut term = |out: &mut String, coef: f64, name: &str| {
            if coef == 0.0 {
                return;
            }
            let sign = if coef < 0.0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let _ = write!(out, " {sign} {} {name}", coef.abs());
            first = false;
        };
        for (i, &c) in self.v_coefs.iter().enumerate() {
            term(&mut out, c, &format!("v{i}"));
        }
        for p in &self.products {
            term(&mut out, p.coef, &format!("u{}_{}", p.i, p.j));
        }
        if first {
            out.push_str(" 0 v0");
        }
        out.push_str("\nSubject To\n");
        for p in &self.products {
            let (i, j) = (p.i, p.j);
            let _ = writeln!(out, " ui{i}_{j}: u{i}_{j} - v{i} <= 0");
            let _ = writeln!(out, " uj{i}_{j}: u{i}_{j} - v{j} <= 0");
            let _ = writeln!(out, " uc{i}_{j}: u{i}_{j} - v{i} - v{j} >= -1");
        }
        if let Some(b) = &self.balance {
            let expr: String = b
                .weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0)
                .map(|(i, w)| format!(" + {w} v{i}"))
                .collect();
            let expr = expr.trim_start_matches(" +");
            let _ = writeln!(out, " balance_hi:{expr} <= {}", b.upper);
            let _ = writeln!(out, " balance_lo:{expr} >= {}", b.lower);
        }
        out.push_str("Bounds\n");
        for p in &self.products {
            let _ = writeln!(out, " u{}_{} >= 0", p.i, p.j);
        }
        out.push_str("Binary\n");
        for i in 0..self.n {
            let _ = writeln!(out, " v{i}");
        }
        out.push_str("End\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Design;
    use crate::netgraph::{generate_random, Network};
    use crate::optimizer::qubo::{build_modified_qubo, build_original_qubo};

    #[test]
    fn single_edge_census() {
        let net = Network::from_edges(2, &[(0, 1)]).unwrap();
        let mip = build_linearized_mip(&build_modified_qubo(&net), None).unwrap();
        assert_eq!(mip.num_binary(), 2);
        assert_eq!(mip.num_continuous(), 1);
        assert_eq!(mip.num_constraints(), 3);
        let lp = mip.to_lp();
        assert!(lp.contains("u0_1 - v1 <= 0"));
        assert!(lp.contains("Binary\n v0\n v1\nEnd"));
    }

    #[test]
    fn modified_problem_is_much_smaller() {
        let net = generate_random(50, 0.1, 7).unwrap();
        let modified = build_linearized_mip(&build_modified_qubo(&net), None).unwrap();
        let original = build_linearized_mip(&build_original_qubo(&net, 0.2).unwrap(), None).unwrap();
        assert_eq!(modified.num_continuous(), net.edge_count());
        assert_eq!(original.num_continuous(), 50 * 49 / 2);
    }

    #[test]
    fn mip_value_maps_to_quadratic_value() {
        let net = generate_random(9, 0.4, 3).unwrap();
        let obj = build_original_qubo(&net, 0.3).unwrap();
        let mip = build_linearized_mip(&obj, Some(&Balance::for_network(&net, 4.0).unwrap())).unwrap();
        for bits in 0u32..1 << 9 {
            let v: Vec<bool> = (0..9).map(|i| bits >> i & 1 == 1).collect();
            let u = mip.optimal_products(&v);
            let x = Design::from_indicators(&v);
            assert!(mip.is_feasible(&v, &u) || !Balance::for_network(&net, 4.0).unwrap().is_satisfied(&x));
            let q = mip.to_quadratic_value(mip.objective(&v, &u));
            assert!((q - obj.value(&x)).abs() < 1e-9 * q.abs().max(1.0));
        }
    }

    #[test]
    fn balance_rows_match_design_constraint() {
        let net = generate_random(8, 0.5, 1).unwrap();
        let bal = Balance::for_network(&net, 3.0).unwrap();
        let mip = build_linearized_mip(&build_modified_qubo(&net), Some(&bal)).unwrap();
        for bits in 0u32..1 << 8 {
            let v: Vec<bool> = (0..8).map(|i| bits >> i & 1 == 1).collect();
            let u = mip.optimal_products(&v);
            assert_eq!(mip.is_feasible(&v, &u), bal.is_satisfied(&Design::from_indicators(&v)));
        }
        let lp = mip.to_lp();
        assert!(lp.contains("balance_hi:") && lp.contains("balance_lo:"));
    }
}
