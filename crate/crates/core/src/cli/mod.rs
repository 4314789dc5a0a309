//! Command-line front end.
//!
//! Every subcommand accepts `--config FILE` (an [`ExperimentConfig`] TOML
//! document) and `--seed`; flags take precedence over the file. The default
//! solver time budget can be set through `NETDESIGN_TIME_BUDGET` (seconds).
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical or
//! infeasibility error, 3 solver budget exhausted (the incumbent is still
//! written).

mod config;
mod render;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub use config::{
    DesignMethod, ExperimentConfig, FitKind, GenerateSpec, NetworkConfig, NetworkSource, OutputConfig,
    SimulationConfig, SolverKind,
};
pub use render::{force_layout, render_svg, RenderOptions, COLOR_A, COLOR_B};

use crate::car::CarParams;
use crate::criteria::{evaluate, expected_random_efficiency, Design};
use crate::error::{Error, Result};
use crate::netgraph::{generate_random, read_edge_list, ClusterSet, Network};
use crate::optimizer::{
    build_linearized_mip, build_modified_qubo, build_original_qubo, combine_clusters, solve_modified, solve_original,
    Balance, SolveReport, SolveStatus, SolverOptions, DEFAULT_ALPHA, DEFAULT_TIME_BUDGET,
};
use crate::rng::derive_seed;
use crate::simulation::{
    nth_random_design, random_design_study, variance_study, Estimator, StudyOptions, DEFAULT_RANDOM_DESIGNS,
    DEFAULT_REPS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Environment variable holding the default solver time budget in seconds.
pub const TIME_BUDGET_ENV: &str = "NETDESIGN_TIME_BUDGET";

/// Spatial parameter used for original-objective construction by default.
pub const DEFAULT_DESIGN_RHO: f64 = 0.2;

#[derive(Debug, Parser)]
#[command(name = "netdesign", version, about = "D-optimal A/B test designs on networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random network without isolated nodes and write it as an edge list.
    GenNetwork(GenNetworkArgs),
    /// Construct a design and write it as `node_id,assignment` CSV.
    Design(DesignCmdArgs),
    /// Tabulate D-efficiency of a design over a list of rho values.
    Evaluate(EvaluateArgs),
    /// Empirical variance of the treatment estimate over simulated responses.
    Simulate(SimulateArgs),
    /// Combine per-cluster designs into one design for the union network.
    Combine(CombineArgs),
    /// Draw the network as SVG with nodes colored by treatment.
    Render(RenderArgs),
    /// Time solver runs over a grid of network sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Experiment configuration file (TOML).
    #[arg(long, value_name = "FILE", global = true)]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NetworkArgs {
    /// Edge-list file.
    #[arg(long, value_name = "FILE")]
    pub network: Option<PathBuf>,
    /// Generate a random network with this many nodes.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Edge probability for a generated network.
    #[arg(long)]
    pub density: Option<f64>,
    /// Seed for a generated network; defaults to `--seed`.
    #[arg(long)]
    pub network_seed: Option<u64>,
    /// One edge-list file per cluster; the clusters are combined disjointly.
    #[arg(long, value_name = "FILE", num_args = 1.., value_delimiter = ',')]
    pub clusters: Vec<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DesignSpecArgs {
    #[arg(long, value_enum)]
    pub method: Option<DesignMethod>,
    /// Spatial parameter for the original objective.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Balance level for the modified objective, in (0.5, 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// Solver time budget in seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Local-search restarts.
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenNetworkArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignCmdArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub spec: DesignSpecArgs,
    /// Design CSV destination (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON report destination.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the linearized program in CPLEX LP format.
    #[arg(long, value_name = "FILE")]
    pub lp: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Design CSV; when absent a design is constructed from the method flags.
    #[arg(long, value_name = "FILE")]
    pub design: Option<PathBuf>,
    #[command(flatten)]
    pub spec: DesignSpecArgs,
    /// Comma-separated rho values.
    #[arg(long = "rhos", value_delimiter = ',', default_value = "0,0.1,0.2,0.3")]
    pub rhos: Vec<f64>,
    /// With `--method random`, report the expected efficiency of a random design.
    #[arg(long)]
    pub expected: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Design CSV; when absent a design is constructed from the method flags.
    #[arg(long, value_name = "FILE")]
    pub design: Option<PathBuf>,
    #[command(flatten)]
    pub spec: DesignSpecArgs,
    /// True spatial parameter of the simulated responses.
    #[arg(long)]
    pub sim_rho: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_enum)]
    pub fit: Option<FitKind>,
    /// Number of random designs averaged over with `--method random`.
    #[arg(long)]
    pub random_designs: Option<usize>,
    #[arg(long)]
    pub noiseless: bool,
    /// Summary CSV destination (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Per-replicate `design,rep,beta_hat` CSV.
    #[arg(long, value_name = "FILE")]
    pub estimates: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CombineArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Cluster edge lists, in order.
    #[arg(long, value_name = "FILE", num_args = 1.., value_delimiter = ',', required = true)]
    pub clusters: Vec<PathBuf>,
    /// Cluster design CSVs, one per cluster.
    #[arg(long, value_name = "FILE", num_args = 1.., value_delimiter = ',', required = true)]
    pub designs: Vec<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON document with the chosen signs and the achieved imbalance.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, value_name = "FILE")]
    pub design: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    pub iterations: usize,
    /// Image width and height in pixels.
    #[arg(long, default_value_t = 600.0)]
    pub size: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_delimiter = ',', default_value = "20,30,40,50")]
    pub nodes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub density: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "modified")]
    pub methods: Vec<DesignMethod>,
    #[arg(long = "rhos", value_delimiter = ',', default_value = "0.2")]
    pub rhos: Vec<f64>,
    #[arg(long = "alphas", value_delimiter = ',', default_value = "0.6")]
    pub alphas: Vec<f64>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// Networks per (n, p) cell.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Solves per row; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Fully resolved design request.
#[derive(Debug, Clone)]
pub struct DesignSpec {
    pub method: DesignMethod,
    pub rho: f64,
    pub alpha: f64,
    pub solver: SolverKind,
    pub options: SolverOptions,
}

impl Default for DesignSpec {
    fn default() -> Self {
        Self {
            method: DesignMethod::Modified,
            rho: DEFAULT_DESIGN_RHO,
            alpha: DEFAULT_ALPHA,
            solver: SolverKind::BranchBound,
            options: SolverOptions::default(),
        }
    }
}

/// A constructed design with its provenance, serialized as the report document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignOutcome {
    pub method: DesignMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub seed: u64,
    pub design: Design,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveReport>,
}

impl DesignOutcome {
    pub fn budget_exceeded(&self) -> bool {
        self.solve
            .as_ref()
            .is_some_and(|s| s.status == SolveStatus::BudgetExceeded)
    }
}

/// Builds a design by the requested method; `random` bypasses the solvers.
pub fn construct_design(net: &Network, spec: &DesignSpec) -> Result<DesignOutcome> {
    let seed = spec.options.seed;
    let (rho, alpha, solve) = match spec.method {
        DesignMethod::Original => (
            Some(spec.rho),
            None,
            Some(solve_original(net, spec.rho, spec.solver.into(), &spec.options)?),
        ),
        DesignMethod::Modified => (
            None,
            Some(spec.alpha),
            Some(solve_modified(net, spec.alpha, spec.solver.into(), &spec.options)?),
        ),
        DesignMethod::Random => (None, None, None),
    };
    let design = match &solve {
        Some(s) => s.design.clone(),
        None => nth_random_design(net.n(), seed, 0)?,
    };
    Ok(DesignOutcome {
        method: spec.method,
        rho,
        alpha,
        seed,
        design,
        solve,
    })
}

/// `rho,d_value,upper_bound,efficiency,var_beta_over_sigma2` rows.
pub fn efficiency_table(net: &Network, design: &Design, rhos: &[f64]) -> Result<String> {
    let mut out = String::from("rho,d_value,upper_bound,efficiency,var_beta_over_sigma2\n");
    for &rho in rhos {
        let r = evaluate(net, design, rho)?;
        let _ = writeln!(
            out,
            "{rho},{},{},{},{}",
            r.d_value, r.upper_bound, r.efficiency, r.beta_variance_over_sigma2
        );
    }
    Ok(out)
}

/// Same columns for the expected random design: `d_value` is the expected
/// determinant and the variance column is left empty.
pub fn expected_random_table(net: &Network, rhos: &[f64]) -> Result<String> {
    let mut out = String::from("rho,d_value,upper_bound,efficiency,var_beta_over_sigma2\n");
    for &rho in rhos {
        let bound = crate::criteria::d_upper_bound(net, rho)?;
        let eff = expected_random_efficiency(net, rho)?;
        let _ = writeln!(out, "{rho},{},{bound},{eff},", eff * bound);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub nodes: Vec<usize>,
    pub densities: Vec<f64>,
    pub methods: Vec<DesignMethod>,
    pub rhos: Vec<f64>,
    pub alphas: Vec<f64>,
    pub solver: SolverKind,
    pub time_budget: Duration,
    pub repeats: usize,
    /// Timed solves per row; the minimum time is reported.
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: DesignMethod,
    pub n: usize,
    pub p: f64,
    pub alpha_or_rho: f64,
    pub seconds: f64,
    pub gap: f64,
    pub status: SolveStatus,
}

/// Times one row per (n, p, repeat, method, parameter). Network `r` of cell
/// `(n, p)` is generated from a seed derived from the master seed, `n` and `r`.
/// Budget exhaustion is recorded in the row, not raised.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &spec.nodes {
        for &p in &spec.densities {
            for r in 0..spec.repeats {
                let net = generate_random(n, p, derive_seed(derive_seed(spec.seed, n as u64), r as u64))?;
                for &method in &spec.methods {
                    let params: &[f64] = match method {
                        DesignMethod::Original => &spec.rhos,
                        DesignMethod::Modified => &spec.alphas,
                        DesignMethod::Random => &[],
                    };
                    for &param in params {
                        let opts = SolverOptions {
                            seed: spec.seed,
                            time_budget: spec.time_budget,
                            ..Default::default()
                        };
                        let mut seconds = f64::INFINITY;
                        let mut report = None;
                        for _ in 0..spec.trials.max(1) {
                            let start = Instant::now();
                            let r = match method {
                                DesignMethod::Original => solve_original(&net, param, spec.solver.into(), &opts)?,
                                _ => solve_modified(&net, param, spec.solver.into(), &opts)?,
                            };
                            seconds = seconds.min(start.elapsed().as_secs_f64());
                            report = Some(r);
                        }
                        let report = report.expect("at least one trial");
                        rows.push(BenchRow {
                            method,
                            n,
                            p,
                            alpha_or_rho: param,
                            seconds,
                            gap: report.gap,
                            status: report.status,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("method,n,p,alpha_or_rho,seconds,gap\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.9},{}",
            r.method, r.n, r.p, r.alpha_or_rho, r.seconds, r.gap
        );
    }
    out
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::SelfLoop { .. }
        | Error::EmptyInput
        | Error::InvalidParameter(_)
        | Error::RetryExhausted { .. }
        | Error::EmptyClusters
        | Error::DimensionMismatch { .. }
        | Error::TooLarge { .. }
        | Error::Io(_)
        | Error::Json(_) => EXIT_USAGE,
        Error::SingularDesign(_)
        | Error::Infeasible(_)
        | Error::BudgetExhausted(_)
        | Error::Factorization(_)
        | Error::Estimation(_) => EXIT_NUMERICAL,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command) -> Result<i32> {
    match command {
        Command::GenNetwork(a) => cmd_gen_network(a),
        Command::Design(a) => cmd_design(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Combine(a) => cmd_combine(a),
        Command::Render(a) => cmd_render(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig> {
    match &common.config {
        Some(path) => ExperimentConfig::read(path),
        None => Ok(ExperimentConfig::default()),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn default_time_budget() -> Result<Duration> {
    match std::env::var(TIME_BUDGET_ENV) {
        Ok(v) => seconds(v.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("{TIME_BUDGET_ENV} must be a number of seconds, got `{v}`"))
        })?),
        Err(_) => Ok(DEFAULT_TIME_BUDGET),
    }
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| Error::InvalidParameter(format!("invalid time budget {s}")))
}

fn resolve_network(args: &NetworkArgs, cfg: &ExperimentConfig, seed: Option<u64>) -> Result<NetworkSource> {
    let flags_given =
        args.network.is_some() || args.nodes.is_some() || args.density.is_some() || !args.clusters.is_empty();
    let mut nc = cfg.network.clone();
    if flags_given {
        let generate = if args.nodes.is_some() || args.density.is_some() {
            let base = cfg.network.generate;
            let missing = |what: &str| Error::InvalidParameter(format!("a generated network needs --{what}"));
            Some(GenerateSpec {
                n: args.nodes.or(base.map(|g| g.n)).ok_or_else(|| missing("nodes"))?,
                p: args.density.or(base.map(|g| g.p)).ok_or_else(|| missing("density"))?,
                seed: args.network_seed.or(seed).or(base.map(|g| g.seed)).unwrap_or(0),
            })
        } else {
            None
        };
        nc = NetworkConfig {
            generate,
            file: args.network.clone(),
            clusters: args.clusters.clone(),
        };
    }
    if let (false, Some(s), Some(g)) = (flags_given, args.network_seed, &mut nc.generate) {
        g.seed = s;
    }
    nc.source()
}

fn resolve_design(args: &DesignSpecArgs, cfg: &ExperimentConfig, seed: u64) -> Result<DesignSpec> {
    let time_budget = match args.time_budget.or(cfg.time_budget) {
        Some(s) => seconds(s)?,
        None => default_time_budget()?,
    };
    let defaults = SolverOptions::default();
    Ok(DesignSpec {
        method: args.method.or(cfg.method).unwrap_or(DesignMethod::Modified),
        rho: args.rho.or(cfg.rho).unwrap_or(DEFAULT_DESIGN_RHO),
        alpha: args.alpha.or(cfg.alpha).unwrap_or(DEFAULT_ALPHA),
        solver: args.solver.or(cfg.solver).unwrap_or(SolverKind::BranchBound),
        options: SolverOptions {
            seed,
            time_budget,
            node_limit: args.node_limit.or(cfg.node_limit),
            restarts: args.restarts.or(cfg.restarts).unwrap_or(defaults.restarts),
            ..defaults
        },
    })
}

fn read_design(path: &Path, net: &Network) -> Result<Design> {
    Design::from_csv(&std::fs::read_to_string(path)?, net)
}

fn cmd_gen_network(a: GenNetworkArgs) -> Result<i32> {
    let cfg = load_config(&a.common)?;
    let base = cfg.network.generate;
    let n = a
        .nodes
        .or(base.map(|g| g.n))
        .ok_or_else(|| Error::InvalidParameter("--nodes is required".into()))?;
    let p = a
        .density
        .or(base.map(|g| g.p))
        .ok_or_else(|| Error::InvalidParameter("--density is required".into()))?;
    let seed = a.common.seed.or(base.map(|g| g.seed)).or(cfg.seed).unwrap_or(0);
    let net = generate_random(n, p, seed)?;
    emit(a.output.as_deref(), &net.to_edge_list())?;
    Ok(EXIT_OK)
}

fn cmd_design(a: DesignCmdArgs) -> Result<i32> {
    let cfg = load_config(&a.common)?;
    let seed = a.common.seed.or(cfg.seed).unwrap_or(0);
    let net = resolve_network(&a.network, &cfg, a.common.seed.or(cfg.seed))?.load()?;
    let spec = resolve_design(&a.spec, &cfg, seed)?;
    if let Some(path) = &a.lp {
        let mip = match spec.method {
            DesignMethod::Original => build_linearized_mip(&build_original_qubo(&net, spec.rho)?, None)?,
            DesignMethod::Modified => build_linearized_mip(
                &build_modified_qubo(&net),
                Some(&Balance::calibrated(&net, spec.alpha)?),
            )?,
            DesignMethod::Random => {
                return Err(Error::InvalidParameter(
                    "--lp needs --method original or modified".into(),
                ))
            }
        };
        std::fs::write(path, mip.to_lp())?;
    }
    let outcome = construct_design(&net, &spec)?;
    emit(
        a.output.as_deref().or(cfg.output.design.as_deref()),
        &outcome.design.to_csv(&net)?,
    )?;
    if let Some(path) = a.report.as_deref().or(cfg.output.report.as_deref()) {
        std::fs::write(path, serde_json::to_string_pretty(&outcome)?)?;
    }
    if let Some(s) = &outcome.solve {
        eprintln!(
            "{} {}: objective {} (lower bound {}, gap {}, {:.3}s)",
            outcome.method, s.method, s.objective, s.lower_bound, s.gap, s.elapsed_seconds
        );
    }
    Ok(if outcome.budget_exceeded() {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<i32> {
    let cfg = load_config(&a.common)?;
    let seed = a.common.seed.or(cfg.seed).unwrap_or(0);
    let net = resolve_network(&a.network, &cfg, a.common.seed.or(cfg.seed))?.load()?;
    let out = a.output.as_deref().or(cfg.output.table.as_deref());
    if a.expected {
        if a.spec.method.or(cfg.method) != Some(DesignMethod::Random) || a.design.is_some() {
            return Err(Error::InvalidParameter(
                "--expected applies to --method random only".into(),
            ));
        }
        emit(out, &expected_random_table(&net, &a.rhos)?)?;
        return Ok(EXIT_OK);
    }
    let (design, code) = match &a.design {
        Some(path) => (read_design(path, &net)?, EXIT_OK),
        None => {
            let o = construct_design(&net, &resolve_design(&a.spec, &cfg, seed)?)?;
            let code = if o.budget_exceeded() { EXIT_BUDGET } else { EXIT_OK };
            (o.design, code)
        }
    };
    emit(out, &efficiency_table(&net, &design, &a.rhos)?)?;
    Ok(code)
}

fn cmd_simulate(a: SimulateArgs) -> Result<i32> {
    let cfg = load_config(&a.common)?;
    let seed = a.common.seed.or(cfg.seed).unwrap_or(0);
    let net = resolve_network(&a.network, &cfg, a.common.seed.or(cfg.seed))?.load()?;
    let sim = &cfg.simulation;
    let d = CarParams::default();
    let params = CarParams::new(
        a.beta0.or(sim.beta0).unwrap_or(d.beta0),
        a.beta.or(sim.beta).unwrap_or(d.beta),
        a.sim_rho.or(sim.rho).unwrap_or(d.rho),
        a.sigma2.or(sim.sigma2).unwrap_or(d.sigma2),
    )?;
    let estimator: Estimator = a.fit.or(sim.fit).unwrap_or(FitKind::Car).into();
    let opts = StudyOptions {
        reps: a.reps.or(sim.reps).unwrap_or(DEFAULT_REPS),
        estimator,
        seed: derive_seed(seed, 1),
        noiseless: a.noiseless || sim.noiseless.unwrap_or(false),
    };
    let spec = resolve_design(&a.spec, &cfg, seed)?;
    let mut code = EXIT_OK;
    let (label, studies, variance) = if a.design.is_none() && spec.method == DesignMethod::Random {
        let k = a
            .random_designs
            .or(sim.random_designs)
            .unwrap_or(DEFAULT_RANDOM_DESIGNS);
        let r = random_design_study(&net, params, k, &opts)?;
        ("random".to_string(), r.studies, r.mean_variance)
    } else {
        let (label, design) = match &a.design {
            Some(path) => ("file".to_string(), read_design(path, &net)?),
            None => {
                let o = construct_design(&net, &spec)?;
                if o.budget_exceeded() {
                    code = EXIT_BUDGET;
                }
                (o.method.to_string(), o.design)
            }
        };
        let s = variance_study(&net, &design, params, &opts)?;
        let v = s.variance;
        (label, vec![s], v)
    };
    let failures: usize = studies.iter().map(|s| s.failures).sum();
    let mut summary = String::from("method,fit,rho,reps,designs,failures,variance\n");
    let _ = writeln!(
        summary,
        "{label},{estimator},{},{},{},{failures},{variance}",
        params.rho,
        opts.reps,
        studies.len()
    );
    emit(a.output.as_deref().or(cfg.output.table.as_deref()), &summary)?;
    if let Some(path) = a.estimates.as_deref().or(cfg.output.estimates.as_deref()) {
        let mut rows = String::from("design,rep,beta_hat\n");
        for (k, s) in studies.iter().enumerate() {
            for (rep, b) in s.estimates.iter().enumerate() {
                let _ = writeln!(rows, "{k},{rep},{}", b.map_or(String::new(), |b| b.to_string()));
            }
        }
        std::fs::write(path, rows)?;
    }
    Ok(code)
}

fn cmd_combine(a: CombineArgs) -> Result<i32> {
    if a.clusters.len() != a.designs.len() {
        return Err(Error::InvalidParameter(format!(
            "{} cluster files but {} design files",
            a.clusters.len(),
            a.designs.len()
        )));
    }
    let mut pairs = Vec::with_capacity(a.clusters.len());
    for (net_path, design_path) in a.clusters.iter().zip(&a.designs) {
        let net = read_edge_list(net_path)?;
        let design = read_design(design_path, &net)?;
        pairs.push((net, design));
    }
    let combined = combine_clusters(&pairs)?;
    let union = crate::netgraph::compose_clusters(&ClusterSet::new(pairs.into_iter().map(|(n, _)| n).collect())?)?;
    emit(a.output.as_deref(), &combined.design.to_csv(&union)?)?;
    if let Some(path) = &a.report {
        std::fs::write(path, serde_json::to_string_pretty(&combined)?)?;
    }
    eprintln!("achieved (sum c_k s_k)^2 = {}", combined.value);
    Ok(EXIT_OK)
}

fn cmd_render(a: RenderArgs) -> Result<i32> {
    let cfg = load_config(&a.common)?;
    let seed = a.common.seed.or(cfg.seed).unwrap_or(0);
    let net = resolve_network(&a.network, &cfg, a.common.seed.or(cfg.seed))?.load()?;
    let design = match a.design.as_deref().or(cfg.output.design.as_deref()) {
        Some(path) => Some(read_design(path, &net)?),
        None => None,
    };
    let opts = RenderOptions {
        seed,
        iterations: a.iterations,
        size: a.size,
        ..Default::default()
    };
    emit(a.output.as_deref(), &render_svg(&net, design.as_ref(), &opts)?)?;
    Ok(EXIT_OK)
}

fn cmd_bench(a: BenchArgs) -> Result<i32> {
    let cfg = load_config(&a.common)?;
    let time_budget = match a.time_budget.or(cfg.time_budget) {
        Some(s) => seconds(s)?,
        None => default_time_budget()?,
    };
    let spec = BenchSpec {
        nodes: a.nodes,
        densities: a.density,
        methods: a.methods,
        rhos: a.rhos,
        alphas: a.alphas,
        solver: a.solver.or(cfg.solver).unwrap_or(SolverKind::BranchBound),
        time_budget,
        repeats: a.repeats,
        trials: a.trials,
        seed: a.common.seed.or(cfg.seed).unwrap_or(0),
    };
    emit(
        a.output.as_deref().or(cfg.output.table.as_deref()),
        &bench_csv(&run_bench(&spec)?),
    )?;
    Ok(EXIT_OK)
}
