//! Solver-side representation of a [`QuadObjective`]: sparse adjacency plus an
//! optional rank-one term, so that a single flip updates in `O(degree)`.

use super::qubo::{Balance, QuadObjective};

pub(crate) struct Model {
    pub n: usize,
    pub constant: f64,
    /// Sparse couplings, both directions stored.
    pub adj: Vec<Vec<(usize, f64)>>,
    /// Weights of the `(Σ g_i x_i)²` term, when present.
    pub weights: Option<Vec<f64>>,
    pub abs_sparse_sum: f64,
}

impl Model {
    pub fn new(obj: &QuadObjective) -> Self {
        let (constant, sparse, weights) = match &obj.split {
            Some(s) => (s.constant, &s.sparse, Some(s.weights.clone())),
            None => (obj.constant, &obj.pairs, None),
        };
        let mut adj = vec![Vec::new(); obj.n];
        let mut abs_sparse_sum = 0.0;
        for &(i, j, q) in sparse {
            adj[i].push((j, q));
            adj[j].push((i, q));
            abs_sparse_sum += q.abs();
        }
        Self {
            n: obj.n,
            constant,
            adj,
            weights,
            abs_sparse_sum,
        }
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(0.0, |w| w[i])
    }

    pub fn value(&self, x: &[i8]) -> f64 {
        let mut v = self.constant;
        for (i, nb) in self.adj.iter().enumerate() {
            for &(j, q) in nb {
                if j > i {
                    v += q * f64::from(x[i] * x[j]);
                }
            }
        }
        if let Some(w) = &self.weights {
            let g: f64 = w.iter().zip(x).map(|(a, &b)| a * f64::from(b)).sum();
            v += g * g;
        }
        v
    }

    /// Root bound with every variable free: the sparse part at `−Σ|q|` and
    /// the rank-one part at zero.
    pub fn root_bound(&self) -> f64 {
        self.constant - self.abs_sparse_sum
    }
}

/// Incremental state for local moves on a full assignment.
pub(crate) struct FlipState<'a> {
    model: &'a Model,
    pub x: Vec<i8>,
    /// `Σ_j sparse_ij x_j`.
    sparse_field: Vec<f64>,
    /// `Σ g_i x_i`.
    g_sum: f64,
    pub value: f64,
    /// Balance value `Σ w_i x_i` (0 without a constraint).
    pub balance: i64,
}

impl<'a> FlipState<'a> {
    pub fn new(model: &'a Model, x: Vec<i8>, balance: Option<&Balance>) -> Self {
        let mut sparse_field = vec![0.0; model.n];
        for (i, nb) in model.adj.iter().enumerate() {
            sparse_field[i] = nb.iter().map(|&(j, q)| q * f64::from(x[j])).sum();
        }
        let g_sum = model
            .weights
            .as_ref()
            .map_or(0.0, |w| w.iter().zip(&x).map(|(a, &b)| a * f64::from(b)).sum());
        let value = model.value(&x);
        let balance = balance.map_or(0, |b| b.weights.iter().zip(&x).map(|(&w, &v)| w * i64::from(v)).sum());
        Self {
            model,
            x,
            sparse_field,
            g_sum,
            value,
            balance,
        }
    }

    /// `Σ_{j≠i} q_ij x_j` including the rank-one couplings `2 g_i g_j`.
    pub fn field(&self, i: usize) -> f64 {
        let g = self.model.weight(i);
        self.sparse_field[i] + 2.0 * g * (self.g_sum - g * f64::from(self.x[i]))
    }

    /// Objective change from flipping `i`.
    pub fn flip_delta(&self, i: usize) -> f64 {
        -2.0 * f64::from(self.x[i]) * self.field(i)
    }

    /// Objective change from flipping both `i` and `j`, given their coupling.
    pub fn pair_delta(&self, i: usize, j: usize, q_ij: f64) -> f64 {
        self.flip_delta(i) + self.flip_delta(j) + 4.0 * q_ij * f64::from(self.x[i] * self.x[j])
    }

    pub fn flip(&mut self, i: usize, balance: Option<&Balance>) {
        self.value += self.flip_delta(i);
        let new = -self.x[i];
        self.x[i] = new;
        let step = 2.0 * f64::from(new);
        for &(j, q) in &self.model.adj[i] {
            self.sparse_field[j] += q * step;
        }
        self.g_sum += self.model.weight(i) * step;
        if let Some(b) = balance {
            self.balance += 2 * b.weights[i] * i64::from(new);
        }
    }

    /// Recomputes the objective from scratch to shed accumulated rounding.
    pub fn resync(&mut self) {
        self.value = self.model.value(&self.x);
    }
}

/// Relative tolerance used when comparing objective values.
pub(crate) fn tolerance(v: f64) -> f64 {
    1e-9 * v.abs().max(1.0)
}
