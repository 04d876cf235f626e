//! Experiment harness behind the `bpsim` binary.
//!
//! Every subcommand is a pure function of an [`ExperimentSpec`]: the same
//! spec and seed give byte-identical output. Exit codes: 0 when every check
//! holds, 1 when a bound is violated, 2 on usage or input errors, 3 when
//! `verify` had to skip a check because the independence oracle was
//! infeasible.
//!
//! `bench` emits one row per instance with these columns:
//!
//! | column | meaning |
//! |---|---|
//! | `family`, `n`, `seed` | generator parameters |
//! | `c` | independence bound used by the algorithms |
//! | `edges` | edge count |
//! | `max_load`, `gprime_max_degree` | placement load and `Δ(G')` |
//! | `bp_rounds` | rounds of one placement |
//! | `mm_rounds` | rounds of maximal matching on `G'` with degree bound `c + 1` |
//! | `approx_rounds`, `iterations` | total rounds and iterations of the approximation |
//! | `matching_size`, `mcm_size`, `ratio` | approximation size, maximum matching size, `mcm / size` |
//! | `residual` | residual fractions after each iteration, `;`-separated |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::generators::{GraphFamily, GraphFamilyParams};
use crate::graph::{load_graph, max_degree, write_edge_list, Graph, GraphError, NodeId};
use crate::matching::{
    bp_mm_once_traced, maximal_matching_pr_with, mcm_approx_traced, ApproxConfig, ExperimentRecord, Matching,
    MatchingError,
};
use crate::oracle::{max_matching_augmenting, mcm_brute_force, neighborhood_independence, MAX_BRUTE_FORCE_EDGES};
use crate::placement::{
    placement_load, run_backup_placement, run_backup_placement_traced, selected_subgraph, IsolatedMode, Placement,
    PlacementError,
};
use crate::selfstab::{run_self_stab_bp, FaultSchedule, StabError};
use crate::sim::{round_count, SimOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SKIPPED: i32 = 3;

pub const DEFAULT_EPSILON: f64 = 0.5;
pub const DEFAULT_BENCH_SIZES: [usize; 8] = [32, 64, 128, 256, 512, 1024, 2048, 4096];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Stab(#[from] StabError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            // The input violates the assumed independence bound.
            CliError::Matching(MatchingError::DegreeBoundExceeded { .. }) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Gen,
    Bp,
    Match,
    Approx,
    Selfstab,
    Verify,
    Bench,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Family(GraphFamilyParams),
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph, CliError> {
        Ok(match self {
            GraphSource::File(path) => load_graph(path)?,
            GraphSource::Family(params) => params.generate()?,
        })
    }

    fn family(&self) -> Option<&GraphFamily> {
        match self {
            GraphSource::Family(p) => Some(&p.family),
            GraphSource::File(_) => None,
        }
    }
}

/// Parameters of a `bench` sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchSweep {
    pub family: GraphFamily,
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub radius: Option<f64>,
    pub p: Option<f64>,
}

/// Everything a run depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub source: Option<GraphSource>,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub c: Option<usize>,
    pub k: Option<usize>,
    pub faults: Option<PathBuf>,
    pub placement: Option<PathBuf>,
    pub rounds: Option<usize>,
    pub sweep: Option<BenchSweep>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(command: Command) -> Self {
        ExperimentSpec {
            command,
            source: None,
            seed: 0,
            epsilon: None,
            c: None,
            k: None,
            faults: None,
            placement: None,
            rounds: None,
            sweep: None,
            format: None,
            out: None,
        }
    }

    fn graph(&self) -> Result<Graph, CliError> {
        self.source.as_ref().ok_or_else(|| usage("a graph is required: --graph FILE or --family NAME --n N"))?.load()
    }
}

/// Result of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmdOutput {
    pub body: String,
    pub exit: i32,
}

impl CmdOutput {
    fn ok(body: String) -> Self {
        CmdOutput { body, exit: EXIT_OK }
    }
}

pub fn execute(spec: &ExperimentSpec) -> Result<CmdOutput, CliError> {
    match spec.command {
        Command::Gen => cmd_gen(spec),
        Command::Bp => cmd_bp(spec),
        Command::Match => cmd_match(spec),
        Command::Approx => cmd_approx(spec),
        Command::Selfstab => cmd_selfstab(spec),
        Command::Verify => cmd_verify(spec),
        Command::Bench => cmd_bench(spec),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn edge_pairs(edges: impl Iterator<Item = (NodeId, NodeId)>) -> Vec<[NodeId; 2]> {
    edges.map(|(u, v)| [u, v]).collect()
}

/// `--c`, else the family's known bound, else the exact oracle.
fn independence_bound(spec: &ExperimentSpec, g: &Graph) -> Result<usize, CliError> {
    if let Some(c) = spec.c {
        return Ok(c);
    }
    if let Some(c) = spec.source.as_ref().and_then(GraphSource::family).and_then(GraphFamily::independence_bound) {
        return Ok(c);
    }
    neighborhood_independence(g).map_err(|e| usage(format!("{e}; pass --c")))
}

fn cmd_gen(spec: &ExperimentSpec) -> Result<CmdOutput, CliError> {
    let g = spec.graph()?;
    let body = match spec.format {
        Some(Format::Json) => {
            #[derive(Serialize)]
            struct Doc {
                nodes: Vec<NodeId>,
                edges: Vec<[NodeId; 2]>,
            }
            to_json(&Doc { nodes: g.nodes().collect(), edges: edge_pairs(g.edges()) })
        }
        Some(Format::Csv) => {
            let mut s = String::from("u,v\n");
            for (u, v) in g.edges() {
                let _ = writeln!(s, "{u},{v}");
            }
            s
        }
        None => write_edge_list(&g),
    };
    Ok(CmdOutput::ok(body))
}

fn cmd_bp(spec: &ExperimentSpec) -> Result<CmdOutput, CliError> {
    let g = spec.graph()?;
    let p = run_backup_placement(&g, IsolatedMode::Lenient)?;
    let body = match spec.format {
        None => p.to_text(),
        Some(Format::Csv) => {
            let mut s = String::from("node,backup\n");
            for (v, w) in &p.selection {
                let _ = writeln!(s, "{v},{w}");
            }
            s
        }
        Some(Format::Json) => {
            let c = spec.c.or_else(|| neighborhood_independence(&g).ok());
            let report = placement_load(&g, &p, c.unwrap_or(usize::MAX));
            #[derive(Serialize)]
            struct Doc {
                selection: std::collections::BTreeMap<NodeId, NodeId>,
                skipped: Vec<NodeId>,
                c: Option<usize>,
                max_load: usize,
                violations: Vec<NodeId>,
                histogram: std::collections::BTreeMap<usize, usize>,
                gprime_max_degree: usize,
            }
            to_json(&Doc {
                selection: p.selection.clone(),
                skipped: p.skipped.clone(),
                c,
                max_load: report.max_load,
                histogram: report.histogram(),
                violations: report.violating_nodes,
                gprime_max_degree: max_degree(&selected_subgraph(&g, &p)),
            })
        }
    };
    Ok(CmdOutput::ok(body))
}

fn cmd_match(spec: &ExperimentSpec) -> Result<CmdOutput, CliError> {
    let g = spec.graph()?;
    let run = bp_mm_once_traced(&g)?;
    let body = match spec.format {
        None => run.matching.to_text(),
        Some(Format::Csv) => {
            let mut s = String::from("u,v\n");
            for (u, v) in run.matching.edges() {
                let _ = writeln!(s, "{u},{v}");
            }
            s
        }
        Some(Format::Json) => {
            #[derive(Serialize)]
            struct Doc {
                size: usize,
                rounds: usize,
                gprime_max_degree: usize,
                edges: Vec<[NodeId; 2]>,
            }
            to_json(&Doc {
                size: run.matching.len(),
                rounds: run.rounds,
                gprime_max_degree: max_degree(&run.gprime),
                edges: edge_pairs(run.matching.edges()),
            })
        }
    };
    Ok(CmdOutput::ok(body))
}

fn approx_config(spec: &ExperimentSpec, c: usize) -> Result<ApproxConfig, CliError> {
    let cfg = ApproxConfig::new(spec.epsilon.unwrap_or(DEFAULT_EPSILON), c)?;
    Ok(match spec.k {
        Some(k) => cfg.with_k(k),
        None => cfg,
    })
}

/// Exact maximum matching size: brute force when small, blossom otherwise.
fn mcm_size(g: &Graph) -> usize {
    if g.edge_count() <= MAX_BRUTE_FORCE_EDGES {
        if let Ok(m) = mcm_brute_force(g) {
            return m.len();
        }
    }
    max_matching_augmenting(g).len()
}

fn cmd_approx(spec: &ExperimentSpec) -> Result<CmdOutput, CliError> {
    let g = spec.graph()?;
    let c = independence_bound(spec, &g)?;
    let trace = mcm_approx_traced(&g, &approx_config(spec, c)?)?;
    let record = ExperimentRecord::from(&trace).with_mcm(mcm_size(&g));
    let body = match spec.format {
        Some(Format::Csv) => {
            let mut s = String::from("n,c,epsilon,k,matching_size,mcm_size,ratio,rounds,residual\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                record.n,
                record.c,
                record.epsilon.unwrap_or_default(),
                record.k,
                record.matching_size,
                record.mcm_size.unwrap_or_default(),
                record.ratio.unwrap_or_default(),
                record.rounds,
                join_residuals(&record.residual)
            );
            s
        }
        _ => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                record: &'a ExperimentRecord,
                iterations: &'a [crate::matching::IterationRecord],
                edges: Vec<[NodeId; 2]>,
            }
            to_json(&Doc { record: &record, iterations: &trace.iterations, edges: edge_pairs(trace.matching.edges()) })
        }
    };
    Ok(CmdOutput::ok(body))
}

fn join_residuals(r: &[f64]) -> String {
    r.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(";")
}

fn cmd_selfstab(spec: &ExperimentSpec) -> Result<CmdOutput, CliError> {
    let g = spec.graph()?;
    let c = independence_bound(spec, &g)?;
    let faults = match &spec.faults {
        Some(path) => FaultSchedule::from_json(&read_file(path)?, spec.seed)?,
        None => FaultSchedule::new(Vec::new(), spec.seed),
    };
    let rounds = spec.rounds.unwrap_or(faults.last_fault_round() + 5);
    let report = run_self_stab_bp(&g, &faults, rounds, c)?;
    let ok = report.stabilization_time == Some(1) && report.stayed_legal && report.rom_intact;
    Ok(CmdOutput { body: to_json(&report), exit: if ok { EXIT_OK } else { EXIT_VIOLATION } })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

fn check(name: &'static str, holds: bool, detail: String) -> Check {
    Check { name, status: if holds { CheckStatus::Pass } else { CheckStatus::Fail }, detail }
}

fn skipped(name: &'static str, why: &str) -> Check {
    Check { name, status: CheckStatus::Skipped, detail: why.to_string() }
}

/// Checks a placement (supplied with `--placement`, else computed) against
/// the load, degree and matching-size bounds.
pub fn verify_checks(g: &Graph, supplied: Option<Placement>, c_override: Option<usize>) -> Result<Vec<Check>, CliError> {
    let (c, c_note) = match c_override {
        Some(c) => (Some(c), "given".to_string()),
        None => match neighborhood_independence(g) {
            Ok(c) => (Some(c), "oracle".to_string()),
            Err(e) => (None, e.to_string()),
        },
    };
    let placement = match supplied {
        Some(p) => p,
        None => run_backup_placement(g, IsolatedMode::Lenient)?,
    };
    let mut checks = Vec::new();
    let valid = placement.validate(g);
    checks.push(check("placement_valid", valid.is_ok(), valid.as_ref().err().map_or(String::new(), |e| e.to_string())));
    if valid.is_err() {
        return Ok(checks);
    }

    let load = placement_load(g, &placement, c.unwrap_or(usize::MAX));
    let gprime = selected_subgraph(g, &placement);
    let gp_delta = max_degree(&gprime);
    let id_bound = g.max_id().map_or(0, |v| v.0);
    let matching: Matching = maximal_matching_pr_with(&gprime, gp_delta, id_bound, &SimOptions::default())?.matching;
    let n = g.node_count() - g.isolated_nodes().len();
    let mcm = mcm_size(g);

    match c {
        Some(c) => {
            checks.push(check("load_bound", load.max_load <= c, format!("max_load {} <= c {c} ({c_note})", load.max_load)));
            checks.push(check("gprime_degree", gp_delta <= c + 1, format!("max degree of G' {gp_delta} <= c+1 {}", c + 1)));
            checks.push(check(
                "matching_ratio",
                matching.len() * (c + 1) >= mcm,
                format!("matching {} >= mcm {mcm} / (c+1) {}", matching.len(), c + 1),
            ));
            checks.push(check(
                "matching_floor",
                2 * (c + 1) * matching.len() >= n,
                format!("matching {} >= n {n} / (2(c+1)) {}", matching.len(), 2 * (c + 1)),
            ));
        }
        None => {
            for name in ["load_bound", "gprime_degree", "matching_ratio", "matching_floor"] {
                checks.push(skipped(name, &c_note));
            }
        }
    }
    Ok(checks)
}

pub fn checks_exit_code(checks: &[Check]) -> i32 {
    if checks.iter().any(|c| c.status == CheckStatus::Fail) {
        EXIT_VIOLATION
    } else if checks.iter().any(|c| c.status == CheckStatus::Skipped) {
        EXIT_SKIPPED
    } else {
        EXIT_OK
    }
}

fn cmd_verify(spec: &ExperimentSpec) -> Result<CmdOutput, CliError> {
    let g = spec.graph()?;
    let supplied = match &spec.placement {
        Some(path) => Some(Placement::parse(&read_file(path)?)?),
        None => None,
    };
    let checks = verify_checks(&g, supplied, spec.c)?;
    let body = match spec.format {
        Some(Format::Json) => to_json(&checks),
        Some(Format::Csv) => {
            let mut s = String::from("check,status,detail\n");
            for c in &checks {
                let _ = writeln!(s, "{},{},\"{}\"", c.name, serde_json::to_value(c.status).unwrap().as_str().unwrap(), c.detail);
            }
            s
        }
        None => {
            let mut s = String::new();
            for c in &checks {
                let status = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                let _ = writeln!(s, "{status} {}: {}", c.name, c.detail);
            }
            s
        }
    };
    Ok(CmdOutput { body, exit: checks_exit_code(&checks) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub c: usize,
    pub edges: usize,
    pub max_load: usize,
    pub gprime_max_degree: usize,
    pub bp_rounds: usize,
    pub mm_rounds: usize,
    pub approx_rounds: usize,
    pub iterations: usize,
    pub matching_size: usize,
    pub mcm_size: usize,
    pub ratio: f64,
    pub residual: String,
}

/// Measures one instance of a sweep.
pub fn bench_instance(params: &GraphFamilyParams, c: Option<usize>, epsilon: f64, k: Option<usize>) -> Result<BenchRow, CliError> {
    let g = params.generate()?;
    let c = match c.or_else(|| params.family.independence_bound()) {
        Some(c) => c,
        None => neighborhood_independence(&g).map_err(|e| usage(format!("{e}; pass --c")))?,
    };
    let id_bound = g.max_id().map_or(0, |v| v.0);
    let opts = SimOptions { id_bound: Some(id_bound), ..Default::default() };
    let (placement, bp_trace) = run_backup_placement_traced(&g, IsolatedMode::Lenient, &opts)?;
    let gprime = selected_subgraph(&g, &placement);
    let mm = maximal_matching_pr_with(&gprime, c + 1, id_bound, &opts)?;
    let mut cfg = ApproxConfig::new(epsilon, c)?;
    if let Some(k) = k {
        cfg = cfg.with_k(k);
    }
    let trace = mcm_approx_traced(&g, &cfg)?;
    let mcm = max_matching_augmenting(&g).len();
    let size = trace.matching.len();
    Ok(BenchRow {
        family: params.family.name().to_string(),
        n: params.n,
        seed: params.seed,
        c,
        edges: g.edge_count(),
        max_load: placement_load(&g, &placement, c).max_load,
        gprime_max_degree: max_degree(&gprime),
        bp_rounds: round_count(&bp_trace).map_err(MatchingError::from)?,
        mm_rounds: mm.rounds,
        approx_rounds: trace.rounds,
        iterations: trace.iterations.len(),
        matching_size: size,
        mcm_size: mcm,
        ratio: if size == 0 { 1.0 } else { mcm as f64 / size as f64 },
        residual: join_residuals(&trace.residuals()),
    })
}

/// Runs a sweep in parallel and returns rows in canonical `(n, seed)` order.
pub fn bench_rows(sweep: &BenchSweep, seed: u64, c: Option<usize>, epsilon: f64, k: Option<usize>) -> Result<Vec<BenchRow>, CliError> {
    let params: Vec<GraphFamilyParams> = sweep
        .sizes
        .iter()
        .flat_map(|&n| {
            (0..sweep.instances as u64).map(move |i| GraphFamilyParams {
                family: sweep.family.clone(),
                n,
                radius: sweep.radius,
                p: sweep.p,
                seed: seed + i,
            })
        })
        .collect();
    let mut rows = params.par_iter().map(|p| bench_instance(p, c, epsilon, k)).collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}

fn cmd_bench(spec: &ExperimentSpec) -> Result<CmdOutput, CliError> {
    let sweep = spec.sweep.as_ref().ok_or_else(|| usage("bench needs a sweep"))?;
    if let GraphFamily::ExplicitFile(_) = sweep.family {
        return Err(usage("bench sweeps a generated family, not a file"));
    }
    let rows = bench_rows(sweep, spec.seed, spec.c, spec.epsilon.unwrap_or(DEFAULT_EPSILON), spec.k)?;
    let body = match spec.format {
        Some(Format::Json) => to_json(&rows),
        _ => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(BENCH_COLUMNS).expect("in-memory write");
            for r in &rows {
                w.serialize(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
        }
    };
    Ok(CmdOutput::ok(body))
}

pub const BENCH_COLUMNS: [&str; 15] = [
    "family",
    "n",
    "seed",
    "c",
    "edges",
    "max_load",
    "gprime_max_degree",
    "bp_rounds",
    "mm_rounds",
    "approx_rounds",
    "iterations",
    "matching_size",
    "mcm_size",
    "ratio",
    "residual",
];

#[derive(Debug, Parser)]
#[command(name = "bpsim", version, about = "Backup placement, matching and self-stabilization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Generate a graph and print it as an edge list.
    Gen(CommonArgs),
    /// Run backup placement.
    Bp(CommonArgs),
    /// One placement followed by maximal matching on the selected subgraph.
    Match(CommonArgs),
    /// Iterated approximation of maximum matching.
    Approx(CommonArgs),
    /// Self-stabilizing placement under a fault schedule.
    Selfstab {
        #[command(flatten)]
        common: CommonArgs,
        /// Rounds to simulate (default: last fault round + 5).
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Check load, degree and matching bounds.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Placement file with `v -> w` lines to check instead of computing one.
        #[arg(long)]
        placement: Option<PathBuf>,
    },
    /// Sweep a generated family and emit per-instance measurements.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated sizes; an empty string gives an empty sweep.
        #[arg(long)]
        sizes: Option<String>,
        /// Instances per size.
        #[arg(long, default_value_t = 1)]
        instances: usize,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Edge-list file.
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,
    /// Generated family: unit-disk, line-graph or random-gnp.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Override the neighborhood-independence bound.
    #[arg(long)]
    pub c: Option<usize>,
    /// Override the iteration count.
    #[arg(long)]
    pub k: Option<usize>,
    /// Fault schedule JSON.
    #[arg(long)]
    pub faults: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn parse_family(name: &str) -> Result<GraphFamily, CliError> {
    GraphFamily::parse(name).ok_or_else(|| usage(format!("unknown family {name:?}")))
}

impl CommonArgs {
    fn into_spec(self, command: Command) -> Result<ExperimentSpec, CliError> {
        let source = match (self.graph, &self.family) {
            (Some(path), _) => Some(GraphSource::File(path)),
            (None, Some(name)) if command != Command::Bench => Some(GraphSource::Family(GraphFamilyParams {
                family: parse_family(name)?,
                n: self.n.ok_or_else(|| usage("--family needs --n"))?,
                radius: self.radius,
                p: self.p,
                seed: self.seed,
            })),
            _ => None,
        };
        Ok(ExperimentSpec {
            command,
            source,
            seed: self.seed,
            epsilon: self.epsilon,
            c: self.c,
            k: self.k,
            faults: self.faults,
            placement: None,
            rounds: None,
            sweep: None,
            format: self.format,
            out: self.out,
        })
    }
}

impl TryFrom<Cli> for ExperimentSpec {
    type Error = CliError;

    fn try_from(cli: Cli) -> Result<Self, CliError> {
        Ok(match cli.command {
            CliCommand::Gen(a) => a.into_spec(Command::Gen)?,
            CliCommand::Bp(a) => a.into_spec(Command::Bp)?,
            CliCommand::Match(a) => a.into_spec(Command::Match)?,
            CliCommand::Approx(a) => a.into_spec(Command::Approx)?,
            CliCommand::Selfstab { common, rounds } => ExperimentSpec { rounds, ..common.into_spec(Command::Selfstab)? },
            CliCommand::Verify { common, placement } => {
                ExperimentSpec { placement, ..common.into_spec(Command::Verify)? }
            }
            CliCommand::Bench { common, sizes, instances } => {
                let family = parse_family(common.family.as_deref().unwrap_or("unit-disk"))?;
                let sizes = match sizes {
                    None => DEFAULT_BENCH_SIZES.to_vec(),
                    Some(s) if s.trim().is_empty() => Vec::new(),
                    Some(s) => s
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| usage(format!("bad size {t:?}"))))
                        .collect::<Result<_, _>>()?,
                };
                let sweep = BenchSweep { family, sizes, instances, radius: common.radius, p: common.p };
                ExperimentSpec { sweep: Some(sweep), ..common.into_spec(Command::Bench)? }
            }
        })
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output to `--out` or stdout. Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = ExperimentSpec::try_from(cli).and_then(|spec| {
        let out = execute(&spec)?;
        match &spec.out {
            Some(path) => std::fs::write(path, &out.body).map_err(|source| CliError::Io { path: path.clone(), source })?,
            None => print!("{}", out.body),
        }
        Ok(out.exit)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hub9() -> GraphSource {
        GraphSource::File(PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/hub9.txt")))
    }

    #[test]
    fn verify_hub_example_passes() {
        let spec = ExperimentSpec { source: Some(hub9()), ..ExperimentSpec::new(Command::Verify) };
        let out = execute(&spec).unwrap();
        assert_eq!(out.exit, EXIT_OK, "{}", out.body);
        assert!(out.body.contains("max_load 4 <= c 4"));
        assert!(out.body.contains("max degree of G' 5"));
    }

    #[test]
    fn verify_skips_without_oracle() {
        let hub: Vec<(u64, u64)> = (1..=30).map(|i| (0, i)).collect();
        let g = Graph::from_pairs(&hub).unwrap();
        let checks = verify_checks(&g, None, None).unwrap();
        assert_eq!(checks_exit_code(&checks), EXIT_SKIPPED);
        let checks = verify_checks(&g, None, Some(30)).unwrap();
        assert_eq!(checks_exit_code(&checks), EXIT_OK);
    }

    #[test]
    fn overloaded_placement_fails_load_bound() {
        let g = Graph::from_pairs(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        let p = Placement::parse("0 -> 1\n1 -> 0\n2 -> 0\n3 -> 0\n").unwrap();
        let checks = verify_checks(&g, Some(p), Some(2)).unwrap();
        assert_eq!(checks_exit_code(&checks), EXIT_VIOLATION);
        assert!(checks.iter().any(|c| c.name == "load_bound" && c.status == CheckStatus::Fail));
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let sweep = BenchSweep { family: GraphFamily::UnitDisk, sizes: vec![], instances: 1, radius: None, p: None };
        let spec = ExperimentSpec { sweep: Some(sweep), ..ExperimentSpec::new(Command::Bench) };
        assert_eq!(execute(&spec).unwrap().body, format!("{}\n", BENCH_COLUMNS.join(",")));
    }

    #[test]
    fn bench_bp_rounds_are_one() {
        let sweep = BenchSweep { family: GraphFamily::UnitDisk, sizes: vec![32, 64], instances: 2, radius: None, p: None };
        let rows = bench_rows(&sweep, 5, None, 0.5, None).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.bp_rounds == 1 && r.max_load <= r.c));
    }

    #[test]
    fn arguments_map_to_spec() {
        let cli = Cli::try_parse_from(["bpsim", "bench", "--sizes", "32,64", "--seed", "3"]).unwrap();
        let spec = ExperimentSpec::try_from(cli).unwrap();
        assert_eq!(spec.sweep.unwrap().sizes, vec![32, 64]);
        assert_eq!(spec.seed, 3);
        let cli = Cli::try_parse_from(["bpsim", "approx", "--family", "unit-disk", "--n", "40", "--epsilon", "0.25"]).unwrap();
        let spec = ExperimentSpec::try_from(cli).unwrap();
        assert!(matches!(spec.source, Some(GraphSource::Family(ref p)) if p.n == 40));
        assert!(Cli::try_parse_from(["bpsim", "bp", "--graph", "x", "--family", "unit-disk"]).is_err());
    }
}
