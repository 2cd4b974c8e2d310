//! End-to-end experiment: transform a graph, rank a query sample on both
//! representations and report how far the rankings drift apart.
//!
//! Configs are JSON:
//!
//! ```json
//! {
//!   "graph": { "generate": { "kind": "dblp", "seed": 1, "n_authors": 800, ... } },
//!   "transformations": [ { "name": "sigmod" }, { "name": "l3s", "types": { "reified": "R" } } ],
//!   "algorithms": [
//!     { "name": "rwr", "params": { "restart_prob": 0.15 } },
//!     { "name": "pathsim", "metapath": "APCPA" }
//!   ],
//!   "queries": { "count": 50, "seed": 7, "type": "A" },
//!   "k": [10, 50]
//! }
//! ```
//!
//! `graph` may instead be `{ "file": "graph.tsv" }`, resolved against the
//! config file's directory. Optional keys: `kendall` (`mode`, `penalty`),
//! `threads`, `record_timings` (default true; when false the time columns
//! render as `NA`), `output` and `format` (`tsv` or `markdown`). PathSim
//! entries also take `metapath_overrides` (map from transformation name to
//! the meta-path used on the transformed graph) and `closest_metapath`
//! (accept a translation that does not preserve walk counts).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::GenParams;
use crate::graph::{NodeId, NodeType, TypedGraph};
use crate::metrics::{per_query_differences, KendallParams};
use crate::similarity::{
    rank_topk, rwr_scores, simrank_all, AlgorithmParams, MetaPath, PathSimIndex, Ranking,
};
use crate::transforms::{TransformError, TransformKind, Transformation};
use crate::Result;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("query {0} is missing from the transformed graph")]
    QueryMissing(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::InvalidConfig(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphSource {
    File(PathBuf),
    Generate(GenParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    pub name: TransformKind,
    #[serde(default)]
    pub inverse: bool,
    /// Role bindings overriding the defaults, e.g. `{"hub": "P"}`.
    #[serde(default)]
    pub types: BTreeMap<String, String>,
}

impl TransformSpec {
    pub fn build(&self) -> Result<Transformation, TransformError> {
        let t = Transformation::new(self.name)
            .with_bindings(self.types.iter().map(|(r, t)| (r.as_str(), t.as_str())))?;
        Ok(if self.inverse { t.inverse() } else { t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Rwr,
    Simrank,
    Pathsim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub name: AlgorithmKind,
    #[serde(default)]
    pub params: AlgorithmParams,
    /// Meta-path on the original graph; PathSim only.
    #[serde(default)]
    pub metapath: Option<String>,
    #[serde(default)]
    pub metapath_overrides: BTreeMap<String, String>,
    #[serde(default)]
    pub closest_metapath: bool,
}

impl AlgorithmSpec {
    pub fn label(&self) -> String {
        match (self.name, &self.metapath) {
            (AlgorithmKind::Rwr, _) => "rwr".into(),
            (AlgorithmKind::Simrank, _) => "simrank".into(),
            (AlgorithmKind::Pathsim, Some(mp)) => format!("pathsim:{mp}"),
            (AlgorithmKind::Pathsim, None) => "pathsim".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuerySpec {
    pub count: usize,
    /// Independent of any generator seed, so one query set can be replayed
    /// over different graphs.
    pub seed: u64,
    #[serde(rename = "type")]
    pub node_type: String,
}

impl Default for QuerySpec {
    fn default() -> Self {
        QuerySpec {
            count: 50,
            seed: 7,
            node_type: "A".into(),
        }
    }
}

fn default_k() -> Vec<usize> {
    vec![10, 50]
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub transformations: Vec<TransformSpec>,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub queries: QuerySpec,
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
    #[serde(default)]
    pub kendall: KendallParams,
    /// Worker threads for per-query evaluation; the global pool when unset.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_true")]
    pub record_timings: bool,
    /// Report destination; stdout when unset.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(s).map_err(|e| invalid(e.to_string()))
    }

    /// Reads a config file; relative graph and output paths are taken
    /// relative to it.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::from_json(&text)?;
        let dir = path.parent().unwrap_or(Path::new(""));
        if let GraphSource::File(p) = &mut cfg.graph {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        if let Some(p) = &mut cfg.output {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.transformations.is_empty() {
            return Err(invalid("at least one transformation is required"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("at least one algorithm is required"));
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return Err(invalid("k must be a non-empty list of positive integers"));
        }
        if self.queries.count == 0 {
            return Err(invalid("queries.count must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        NodeType::new(&self.queries.node_type).map_err(|e| invalid(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.kendall.penalty) {
            return Err(invalid("kendall.penalty must lie in [0,1]"));
        }
        for a in &self.algorithms {
            a.params
                .validate()
                .map_err(|e| invalid(format!("{}: {e}", a.label())))?;
            match (a.name, &a.metapath) {
                (AlgorithmKind::Pathsim, None) => {
                    return Err(invalid("pathsim requires a metapath"));
                }
                (AlgorithmKind::Pathsim, Some(mp)) => {
                    let mp: MetaPath = mp.parse().map_err(|e| invalid(format!("{e}")))?;
                    if mp.first().as_str() != self.queries.node_type {
                        return Err(invalid(format!(
                            "meta-path {mp} does not start at the query type {}",
                            self.queries.node_type
                        )));
                    }
                }
                _ => {}
            }
        }
        for t in &self.transformations {
            t.build().map_err(|e| invalid(e.to_string()))?;
        }
        Ok(())
    }
}

/// Node and edge counts of one representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSize {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffSummary {
    pub mean: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl DiffSummary {
    fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return DiffSummary {
                mean: 0.0,
                min: 0.0,
                median: 0.0,
                max: 0.0,
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        DiffSummary {
            mean: values.iter().sum::<f64>() / n as f64,
            min: sorted[0],
            median,
            max: sorted[n - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RowOutcome {
    Compared(DiffSummary),
    NotComparable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub algorithm: String,
    pub transformation: String,
    pub k: usize,
    /// Meta-path used on the transformed graph, for PathSim rows.
    pub translated_metapath: Option<String>,
    pub outcome: RowOutcome,
    pub time_orig_ms: Option<f64>,
    pub time_trans_ms: Option<f64>,
}

impl ReportRow {
    pub fn mean(&self) -> Option<f64> {
        match &self.outcome {
            RowOutcome::Compared(s) => Some(s.mean),
            RowOutcome::NotComparable(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ExperimentReport {
    pub sizes: Vec<GraphSize>,
    /// Sampled query keys, in evaluation order.
    pub queries: Vec<String>,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Tsv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(invalid(format!("unknown report format {other:?}"))),
        }
    }
}

/// Rankings of every query on one graph, plus the time it took.
struct RankedSide {
    rankings: Vec<Ranking>,
    elapsed: Duration,
}

fn rank_queries(
    g: &TypedGraph,
    queries: &[NodeId],
    algo: &AlgorithmSpec,
    metapath: Option<&MetaPath>,
    k: usize,
) -> Result<RankedSide> {
    let start = Instant::now();
    let rankings = match algo.name {
        AlgorithmKind::Rwr => queries
            .par_iter()
            .map(|&q| Ok(rank_topk(&rwr_scores(g, q, &algo.params)?, g, q, k)))
            .collect::<Result<Vec<_>>>()?,
        AlgorithmKind::Simrank => {
            let table = simrank_all(g, &algo.params)?;
            queries
                .par_iter()
                .map(|&q| rank_topk(&table.scores(q), g, q, k))
                .collect()
        }
        AlgorithmKind::Pathsim => {
            let mp = metapath.expect("pathsim rows carry a meta-path");
            let index = PathSimIndex::new(g, mp)?;
            queries
                .par_iter()
                .map(|&q| Ok(rank_topk(&index.scores(g, q)?, g, q, k)))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(RankedSide {
        rankings,
        elapsed: start.elapsed(),
    })
}

/// Samples `spec.count` distinct nodes of the query type.
pub fn sample_queries(g: &TypedGraph, spec: &QuerySpec) -> Result<Vec<NodeId>> {
    let t = NodeType::new(&spec.node_type)?;
    let population = g.nodes_of_type(&t);
    if spec.count > population.len() {
        return Err(invalid(format!(
            "cannot sample {} queries from {} nodes of type {t}",
            spec.count,
            population.len()
        ))
        .into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut picked = rand::seq::index::sample(&mut rng, population.len(), spec.count).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| population[i]).collect())
}

fn load_graph(source: &GraphSource) -> Result<TypedGraph> {
    match source {
        GraphSource::Generate(p) => Ok(p.generate()?),
        GraphSource::File(path) => {
            let file = std::fs::File::open(path).map_err(|e| HarnessError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            Ok(TypedGraph::load(std::io::BufReader::new(file))?)
        }
    }
}

/// Chooses the meta-path for the transformed side, or explains why PathSim
/// cannot be compared under `t`.
fn transformed_metapath(
    algo: &AlgorithmSpec,
    mp: &MetaPath,
    t: &Transformation,
) -> Result<Result<MetaPath, String>> {
    if let Some(over) = algo.metapath_overrides.get(&t.name()) {
        return Ok(Ok(over.parse()?));
    }
    match t.translate_metapath(mp) {
        Ok(tr) if tr.exact || algo.closest_metapath => Ok(Ok(tr.path)),
        Ok(tr) => Ok(Err(format!(
            "not comparable by exact meta-path: {} only approximates {mp} under {t}",
            tr.path
        ))),
        Err(TransformError::NoEquivalentMetaPath(m)) => {
            Ok(Err(format!("no equivalent meta-path for {m}")))
        }
        Err(e) => Err(e.into()),
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let work = || run_inner(cfg);
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

fn run_inner(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let original = load_graph(&cfg.graph)?;
    let queries = sample_queries(&original, &cfg.queries)?;
    let k_max = *cfg.k.iter().max().expect("validated non-empty");
    let timing = |d: Duration| cfg.record_timings.then(|| ms(d));

    let mut report = ExperimentReport {
        sizes: vec![GraphSize {
            name: "original".into(),
            nodes: original.node_count(),
            edges: original.edge_count(),
        }],
        queries: queries.iter().map(|&q| original.describe(q)).collect(),
        rows: Vec::new(),
    };

    let mut transformed = Vec::with_capacity(cfg.transformations.len());
    for spec in &cfg.transformations {
        let t = spec.build()?;
        let g = t.apply(&original)?;
        report.sizes.push(GraphSize {
            name: t.name(),
            nodes: g.node_count(),
            edges: g.edge_count(),
        });
        let mapped = queries
            .iter()
            .map(|&q| {
                let n = original.node(q)?;
                g.find(&n.ntype, &n.label)
                    .ok_or_else(|| HarnessError::QueryMissing(n.key()).into())
            })
            .collect::<Result<Vec<_>>>()?;
        transformed.push((t, g, mapped));
    }

    for algo in &cfg.algorithms {
        let metapath: Option<MetaPath> = algo.metapath.as_deref().map(str::parse).transpose()?;
        let base = rank_queries(&original, &queries, algo, metapath.as_ref(), k_max)?;
        for (t, g, mapped) in &transformed {
            let (other, translated) = match &metapath {
                Some(mp) => match transformed_metapath(algo, mp, t)? {
                    Ok(tmp) => {
                        let side = rank_queries(g, mapped, algo, Some(&tmp), k_max)?;
                        (Ok(side), Some(tmp.to_string()))
                    }
                    Err(reason) => (Err(reason), None),
                },
                None => (Ok(rank_queries(g, mapped, algo, None, k_max)?), None),
            };
            for &k in &cfg.k {
                let (outcome, time_trans) = match &other {
                    Ok(side) => {
                        let cut =
                            |rs: &[Ranking]| rs.iter().map(|r| r.truncated(k)).collect::<Vec<_>>();
                        let diffs = per_query_differences(
                            &cut(&base.rankings),
                            &cut(&side.rankings),
                            &cfg.kendall,
                        )?;
                        (
                            RowOutcome::Compared(DiffSummary::of(&diffs)),
                            timing(side.elapsed),
                        )
                    }
                    Err(reason) => (RowOutcome::NotComparable(reason.clone()), None),
                };
                report.rows.push(ReportRow {
                    algorithm: algo.label(),
                    transformation: t.name(),
                    k,
                    translated_metapath: translated.clone(),
                    outcome,
                    time_orig_ms: timing(base.elapsed),
                    time_trans_ms: time_trans,
                });
            }
        }
    }
    Ok(report)
}

fn num(x: Option<f64>, prec: usize) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.prec$}"))
}

pub const TSV_HEADER: &str =
    "algorithm\ttransformation\tk\tmean_diff\tmedian_diff\ttime_orig_ms\ttime_trans_ms";

pub fn render_report(r: &ExperimentReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            out.push_str(TSV_HEADER);
            out.push('\n');
            for row in &r.rows {
                let median = match &row.outcome {
                    RowOutcome::Compared(s) => Some(s.median),
                    RowOutcome::NotComparable(_) => None,
                };
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    row.algorithm,
                    row.transformation,
                    row.k,
                    num(row.mean(), 6),
                    num(median, 6),
                    num(row.time_orig_ms, 3),
                    num(row.time_trans_ms, 3),
                )
                .expect("writing to a String");
            }
        }
        ReportFormat::Markdown => {
            out.push_str("## Graph sizes\n\n| graph | nodes | edges |\n|---|---:|---:|\n");
            for s in &r.sizes {
                writeln!(out, "| {} | {} | {} |", s.name, s.nodes, s.edges).expect("String");
            }
            writeln!(
                out,
                "\n## Average ranking difference ({} queries)\n",
                r.queries.len()
            )
            .expect("String");
            out.push_str(
                "| algorithm | transformation | k | mean | min | median | max | time orig (ms) | time trans (ms) | note |\n\
                 |---|---|---:|---:|---:|---:|---:|---:|---:|---|\n",
            );
            for row in &r.rows {
                let (stats, note) = match &row.outcome {
                    RowOutcome::Compared(s) => (
                        format!(
                            "{:.3} | {:.3} | {:.3} | {:.3}",
                            s.mean, s.min, s.median, s.max
                        ),
                        row.translated_metapath
                            .as_ref()
                            .map(|m| format!("transformed meta-path {m}"))
                            .unwrap_or_default(),
                    ),
                    RowOutcome::NotComparable(reason) => {
                        ("NA | NA | NA | NA".to_string(), reason.clone())
                    }
                };
                writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    row.algorithm,
                    row.transformation,
                    row.k,
                    stats,
                    num(row.time_orig_ms, 1),
                    num(row.time_trans_ms, 1),
                    note
                )
                .expect("String");
            }
        }
    }
    out
}
