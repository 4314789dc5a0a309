//! Undirected simple networks: edge-list IO, Bernoulli random generation and
//! block-diagonal composition of disjoint clusters.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Range;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Maximum number of redraws in [`generate_random`] before giving up.
pub const MAX_GENERATION_ATTEMPTS: usize = 1000;

/// An undirected simple graph without isolated nodes.
///
/// Adjacency is kept as sorted neighbor lists; `degrees[i]` always equals the
/// length of `neighbors[i]`. Values are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    neighbors: Vec<Vec<usize>>,
    degrees: Vec<usize>,
    labels: Option<Vec<String>>,
    edge_count: usize,
}

impl Network {
    /// Builds a network on `n` nodes from undirected edges. Duplicate edges
    /// (in either orientation) are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::build(n, edges, None)
    }

    /// Like [`Network::from_edges`] with external node identifiers.
    pub fn with_labels(n: usize, edges: &[(usize, usize)], labels: Vec<String>) -> Result<Self> {
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: labels.len(),
            });
        }
        Self::build(n, edges, Some(labels))
    }

    fn build(n: usize, edges: &[(usize, usize)], labels: Option<Vec<String>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("network needs at least one node".into()));
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop on node {i}")));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        if let Some(i) = neighbors.iter().position(Vec::is_empty) {
            return Err(Error::InvalidParameter(format!("node {i} is isolated")));
        }
        let degrees: Vec<usize> = neighbors.iter().map(Vec::len).collect();
        let edge_count = degrees.iter().sum::<usize>() / 2;
        let net = Self {
            neighbors,
            degrees,
            labels,
            edge_count,
        };
        debug_assert!(net.check_invariants());
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    /// Degree vector `m`.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Sorted neighbors of node `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Undirected edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Sum of degrees, equal to the ordered-pair sum of the adjacency matrix.
    pub fn degree_sum(&self) -> f64 {
        self.degrees.iter().sum::<usize>() as f64
    }

    pub fn degree_square_sum(&self) -> f64 {
        self.degrees.iter().map(|&m| (m * m) as f64).sum()
    }

    /// Fraction of unordered pairs that are edges.
    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        if self.n() < 2 {
            return 0.0;
        }
        self.edge_count as f64 / (n * (n - 1.0) / 2.0)
    }

    /// Dense 0/1 adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        let mut w = vec![vec![0u8; n]; n];
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                w[i][j] = 1;
            }
        }
        w
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External identifier of node `i` (its index when no labels are set).
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// Symmetry, zero diagonal, no isolated node and degree bookkeeping.
    pub fn check_invariants(&self) -> bool {
        let n = self.n();
        self.degrees.len() == n
            && self.neighbors.iter().enumerate().all(|(i, nb)| {
                !nb.is_empty()
                    && nb.len() == self.degrees[i]
                    && nb.windows(2).all(|w| w[0] < w[1])
                    && nb.iter().all(|&j| j < n && j != i && self.has_edge(j, i))
            })
            && self.degrees.iter().sum::<usize>() == 2 * self.edge_count
    }

    /// Edge-list text: one `label label` line per undirected edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{} {}", self.label(i), self.label(j));
        }
        out
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            n: self.n(),
            edges: self.edges().collect(),
            degrees: self.degrees.clone(),
            labels: self.labels.clone(),
        }
    }
}

/// Serialized form of a [`Network`] for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub degrees: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl TryFrom<NetworkDocument> for Network {
    type Error = Error;

    fn try_from(doc: NetworkDocument) -> Result<Self> {
        let net = match doc.labels {
            Some(labels) => Network::with_labels(doc.n, &doc.edges, labels)?,
            None => Network::from_edges(doc.n, &doc.edges)?,
        };
        if net.degrees() != doc.degrees.as_slice() {
            return Err(Error::InvalidParameter(
                "degree vector does not match the edge list".into(),
            ));
        }
        Ok(net)
    }
}

/// Parses whitespace-delimited edge lines. Lines starting with `#` and blank
/// lines are skipped; extra columns after the two node tokens are ignored.
/// Node labels are mapped to dense indices in first-appearance order.
pub fn load_edge_list<'a>(text: &'a str) -> Result<Network> {
    let mut index: HashMap<&'a str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected two node tokens, found `{line}`"),
            });
        };
        if a == b {
            return Err(Error::SelfLoop {
                line: lineno + 1,
                node: a.to_string(),
            });
        }
        let mut id = |tok: &'a str| -> usize {
            *index.entry(tok).or_insert_with(|| {
                labels.push(tok.to_string());
                labels.len() - 1
            })
        };
        let (i, j) = (id(a), id(b));
        edges.push((i, j));
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    Network::with_labels(labels.len(), &edges, labels)
}

/// Reads and parses an edge-list file.
pub fn read_edge_list(path: impl AsRef<std::path::Path>) -> Result<Network> {
    let text = std::fs::read_to_string(path)?;
    load_edge_list(&text)
}

/// Draws each of the `n(n-1)/2` pairs independently with probability `p`,
/// redrawing from a derived sub-seed while any node is isolated.
pub fn generate_random(n: usize, p: f64, seed: u64) -> Result<Network> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("density must lie in (0, 1), got {p}")));
    }
    for attempt in 0..MAX_GENERATION_ATTEMPTS {
        let mut rng = rng::substream(seed, attempt as u64);
        let mut edges = Vec::new();
        let mut degree = vec![0usize; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j));
                    degree[i] += 1;
                    degree[j] += 1;
                }
            }
        }
        if degree.iter().all(|&d| d > 0) {
            return Network::from_edges(n, &edges);
        }
    }
    Err(Error::RetryExhausted {
        n,
        p,
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}

/// An ordered list of node-disjoint clusters and their index ranges in the
/// composed network.
#[derive(Debug, Clone)]
pub struct ClusterSet {
    clusters: Vec<Network>,
    offsets: Vec<Range<usize>>,
}

impl ClusterSet {
    pub fn new(clusters: Vec<Network>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::EmptyClusters);
        }
        let mut start = 0;
        let offsets = clusters
            .iter()
            .map(|c| {
                let r = start..start + c.n();
                start = r.end;
                r
            })
            .collect();
        Ok(Self { clusters, offsets })
    }

    pub fn clusters(&self) -> &[Network] {
        &self.clusters
    }

    pub fn offsets(&self) -> &[Range<usize>] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn total_nodes(&self) -> usize {
        self.offsets.last().map_or(0, |r| r.end)
    }
}

/// Block-diagonal union of the clusters. A single cluster is returned as is;
/// otherwise labels (when every cluster has them) become `"{k}:{label}"`.
pub fn compose_clusters(set: &ClusterSet) -> Result<Network> {
    if set.is_empty() {
        return Err(Error::EmptyClusters);
    }
    if set.len() == 1 {
        return Ok(set.clusters[0].clone());
    }
    let mut edges = Vec::new();
    for (c, range) in set.clusters.iter().zip(&set.offsets) {
        edges.extend(c.edges().map(|(i, j)| (i + range.start, j + range.start)));
    }
    let n = set.total_nodes();
    if set.clusters.iter().all(|c| c.labels().is_some()) {
        let labels = set
            .clusters
            .iter()
            .enumerate()
            .flat_map(|(k, c)| (0..c.n()).map(move |i| format!("{k}:{}", c.label(i))))
            .collect();
        Network::with_labels(n, &edges, labels)
    } else {
        Network::from_edges(n, &edges)
    }
}
