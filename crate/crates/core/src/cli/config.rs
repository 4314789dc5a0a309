//! `ExperimentConfig`: the TOML document accepted by `--config`.
//!
//! ```toml
//! method = "modified"
//! alpha = 0.6
//! seed = 7
//!
//! [network.generate]
//! n = 50
//! p = 0.1
//! seed = 7
//!
//! [simulation]
//! rho = 0.3
//! reps = 500
//! fit = "car"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::car::CarParams;
use crate::error::{Error, Result};
use crate::netgraph::{compose_clusters, generate_random, read_edge_list, ClusterSet, Network};
use crate::optimizer::Method;
use crate::simulation::Estimator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DesignMethod {
    Original,
    Modified,
    Random,
}

impl std::fmt::Display for DesignMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DesignMethod::Original => "original",
            DesignMethod::Modified => "modified",
            DesignMethod::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Brute,
    BranchBound,
    LocalSearch,
}

impl From<SolverKind> for Method {
    fn from(s: SolverKind) -> Self {
        match s {
            SolverKind::Brute => Method::Brute,
            SolverKind::BranchBound => Method::BranchBound,
            SolverKind::LocalSearch => Method::LocalSearch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Car,
    Lm,
}

impl From<FitKind> for Estimator {
    fn from(f: FitKind) -> Self {
        match f {
            FitKind::Car => Estimator::Car,
            FitKind::Lm => Estimator::Lm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub n: usize,
    pub p: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    pub generate: Option<GenerateSpec>,
    pub file: Option<PathBuf>,
    /// One edge-list file per cluster.
    pub clusters: Vec<PathBuf>,
}

/// Where the network comes from. Exactly one source is allowed.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    Generate(GenerateSpec),
    File(PathBuf),
    Clusters(Vec<PathBuf>),
}

impl NetworkSource {
    pub fn load(&self) -> Result<Network> {
        match self {
            NetworkSource::Generate(g) => generate_random(g.n, g.p, g.seed),
            NetworkSource::File(path) => read_edge_list(path),
            NetworkSource::Clusters(paths) => {
                let nets = paths.iter().map(read_edge_list).collect::<Result<Vec<_>>>()?;
                compose_clusters(&ClusterSet::new(nets)?)
            }
        }
    }
}

impl NetworkConfig {
    pub fn source(&self) -> Result<NetworkSource> {
        let mut sources = Vec::new();
        if let Some(g) = self.generate {
            sources.push(NetworkSource::Generate(g));
        }
        if let Some(f) = &self.file {
            sources.push(NetworkSource::File(f.clone()));
        }
        if !self.clusters.is_empty() {
            sources.push(NetworkSource::Clusters(self.clusters.clone()));
        }
        match sources.len() {
            1 => Ok(sources.pop().expect("one source")),
            0 => Err(Error::InvalidParameter(
                "no network source: give a file, generation parameters or cluster files".into(),
            )),
            _ => Err(Error::InvalidParameter(
                "exactly one network source may be given".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub beta0: Option<f64>,
    pub beta: Option<f64>,
    /// True spatial parameter of the simulated responses.
    pub rho: Option<f64>,
    pub sigma2: Option<f64>,
    pub reps: Option<usize>,
    pub fit: Option<FitKind>,
    pub random_designs: Option<usize>,
    pub noiseless: Option<bool>,
}

impl SimulationConfig {
    pub fn params(&self) -> Result<CarParams> {
        let d = CarParams::default();
        CarParams::new(
            self.beta0.unwrap_or(d.beta0),
            self.beta.unwrap_or(d.beta),
            self.rho.unwrap_or(d.rho),
            self.sigma2.unwrap_or(d.sigma2),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub design: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub estimates: Option<PathBuf>,
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub network: NetworkConfig,
    pub method: Option<DesignMethod>,
    /// Spatial parameter used to build the original objective.
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub solver: Option<SolverKind>,
    pub time_budget: Option<f64>,
    pub node_limit: Option<u64>,
    pub restarts: Option<usize>,
    pub simulation: SimulationConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.network.source()?;
        if let Some(reps) = self.simulation.reps {
            if reps < 2 {
                return Err(Error::InvalidParameter(format!("reps must be at least 2, got {reps}")));
            }
        }
        self.simulation.params()?;
        Ok(())
    }
}
