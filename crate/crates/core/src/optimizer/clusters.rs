//! Sign selection when concatenating per-cluster designs.

use serde::{Deserialize, Serialize};

use crate::criteria::Design;
use crate::error::{Error, Result};
use crate::netgraph::Network;

/// Largest cluster count solved by enumeration; beyond it a subset-sum
/// dynamic program over achievable totals is used.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterCombination {
    pub signs: Vec<i8>,
    pub design: Design,
    /// Per-cluster imbalances `s_k = Σ_i m_ik x_ik`.
    pub sums: Vec<i64>,
    /// Achieved `(Σ c_k s_k)²`.
    pub value: i128,
}

/// Chooses `c ∈ {±1}ᴷ` minimizing `(Σ c_k s_k)²` and concatenates the cluster
/// designs with cluster `k` multiplied by `c_k`. Among minimizers the result
/// has `c_1 = +1` and is lexicographically first with `+1` before `−1`.
pub fn combine_clusters(clusters: &[(Network, Design)]) -> Result<ClusterCombination> {
    if clusters.is_empty() {
        return Err(Error::EmptyClusters);
    }
    let mut sums = Vec::with_capacity(clusters.len());
    for (net, design) in clusters {
        design.check_len(net.n())?;
        sums.push(design.degree_imbalance(net));
    }
    let signs = if sums.len() <= ENUMERATION_LIMIT {
        best_signs_enumerate(&sums)
    } else {
        best_signs_dp(&sums)
    };
    let total: i64 = signs.iter().zip(&sums).map(|(&c, &s)| i64::from(c) * s).sum();
    let design = Design::new(
        clusters
            .iter()
            .zip(&signs)
            .flat_map(|((_, d), &c)| d.values().iter().map(move |&x| x * c))
            .collect(),
    )?;
    Ok(ClusterCombination {
        signs,
        design,
        sums,
        value: i128::from(total) * i128::from(total),
    })
}

/// Enumerates the `2^(K−1)` sign vectors with `c_1 = +1`. Bit `K−1−k` of the
/// mask set means `c_k = −1`, so increasing masks visit sign vectors in
/// lexicographic order.
pub fn best_signs_enumerate(sums: &[i64]) -> Vec<i8> {
    let k = sums.len();
    if k == 0 {
        return Vec::new();
    }
    let rest = k - 1;
    let mut best_mask = 0u64;
    let mut best = i128::MAX;
    for mask in 0..(1u64 << rest) {
        let mut total = sums[0];
        for (idx, &s) in sums[1..].iter().enumerate() {
            if mask >> (rest - 1 - idx) & 1 == 1 {
                total -= s;
            } else {
                total += s;
            }
        }
        let v = i128::from(total) * i128::from(total);
        if v < best {
            best = v;
            best_mask = mask;
            if v == 0 {
                break;
            }
        }
    }
    std::iter::once(1)
        .chain((0..rest).map(|idx| if best_mask >> (rest - 1 - idx) & 1 == 1 { -1 } else { 1 }))
        .collect()
}

/// Subset-sum dynamic program: `reach[k]` holds the totals achievable by
/// `c_k … c_K`; signs are then fixed greedily, preferring `+1`, while some
/// optimal total stays reachable.
pub fn best_signs_dp(sums: &[i64]) -> Vec<i8> {
    let k = sums.len();
    if k == 0 {
        return Vec::new();
    }
    let span: i64 = sums.iter().map(|s| s.abs()).sum();
    let width = (2 * span + 1) as usize;
    let idx = |t: i64| (t + span) as usize;
    let mut reach = vec![vec![false; width]; k + 1];
    reach[k][idx(0)] = true;
    for pos in (0..k).rev() {
        let s = sums[pos];
        let (head, tail) = reach.split_at_mut(pos + 1);
        let (cur, next) = (&mut head[pos], &tail[0]);
        for (t_idx, &ok) in next.iter().enumerate() {
            if ok {
                let t = t_idx as i64 - span;
                for v in [t + s, t - s] {
                    if v.abs() <= span {
                        cur[idx(v)] = true;
                    }
                }
            }
        }
    }
    // c_1 = +1: the remaining clusters must reach target − s_1.
    let best_abs = (-span..=span)
        .filter(|&t| (t - sums[0]).abs() <= span && reach[1][idx(t - sums[0])])
        .map(i64::abs)
        .min()
        .expect("the all-plus assignment is always reachable");
    let targets = [best_abs, -best_abs];
    let mut signs = vec![1i8];
    let mut partial = sums[0];
    for pos in 1..k {
        let feasible_with = |c: i64| {
            let p = partial + c * sums[pos];
            targets
                .iter()
                .any(|&t| (t - p).abs() <= span && reach[pos + 1][idx(t - p)])
        };
        let c = if feasible_with(1) { 1 } else { -1 };
        debug_assert!(feasible_with(c));
        partial += c * sums[pos];
        signs.push(c as i8);
    }
    signs
}
