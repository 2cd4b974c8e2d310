//! Link-based similarity search: random walk with restart, SimRank and
//! PathSim, plus the shared ranking step.

mod pathsim;
mod rwr;
mod simrank;

pub use pathsim::{path_count, pathsim_scores, MetaPath, PathCountTable, PathSimIndex};
pub use rwr::{rwr_run, rwr_scores, RwrRun};
pub use simrank::{simrank_all, SimRankTable};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, NodeId, NodeType, TypedGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("node not found: {0}")]
    NodeNotFound(String),
    #[error("graph has {nodes} nodes, above the configured cap of {cap}")]
    GraphTooLarge { nodes: usize, cap: usize },
    #[error("node type {0} does not occur in the graph")]
    UnknownType(NodeType),
    #[error("meta-path {0} is not symmetric")]
    AsymmetricMetaPath(String),
    #[error("query {query} has type {actual}, meta-path starts at {expected}")]
    TypeMismatch {
        query: String,
        expected: NodeType,
        actual: NodeType,
    },
    #[error("invalid meta-path: {0}")]
    InvalidMetaPath(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("path count overflow on meta-path {0}")]
    CountOverflow(String),
    #[error("empty graph")]
    EmptyGraph,
}

impl From<GraphError> for SimilarityError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::NodeNotFound(s) => SimilarityError::NodeNotFound(s),
            other => SimilarityError::InvalidParams(other.to_string()),
        }
    }
}

/// Tunables of the three algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmParams {
    /// RWR restart probability.
    pub restart_prob: f64,
    /// SimRank decay factor.
    pub simrank_decay: f64,
    pub simrank_iters: usize,
    /// SimRank refuses graphs with more nodes than this.
    pub simrank_max_nodes: usize,
    /// RWR stops once the L1 change of one sweep drops below this.
    pub rwr_tol: f64,
    pub rwr_max_iters: usize,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        AlgorithmParams {
            restart_prob: 0.15,
            simrank_decay: 0.8,
            simrank_iters: 10,
            simrank_max_nodes: 20_000,
            rwr_tol: 1e-10,
            rwr_max_iters: 1000,
        }
    }
}

impl AlgorithmParams {
    pub fn validate(&self) -> Result<(), SimilarityError> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.restart_prob) {
            return Err(SimilarityError::InvalidParams(format!(
                "restart_prob must lie in (0,1), got {}",
                self.restart_prob
            )));
        }
        if !open_unit(self.simrank_decay) {
            return Err(SimilarityError::InvalidParams(format!(
                "simrank_decay must lie in (0,1), got {}",
                self.simrank_decay
            )));
        }
        if !(self.rwr_tol.is_finite() && self.rwr_tol > 0.0) {
            return Err(SimilarityError::InvalidParams(format!(
                "rwr_tol must be positive, got {}",
                self.rwr_tol
            )));
        }
        if self.rwr_max_iters == 0 {
            return Err(SimilarityError::InvalidParams(
                "rwr_max_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SimilarityError> {
        let bad = |e: &dyn std::fmt::Display| {
            SimilarityError::InvalidParams(format!("{key}={value}: {e}"))
        };
        match key {
            "restart_prob" | "c" => self.restart_prob = value.parse().map_err(|e| bad(&e))?,
            "simrank_decay" | "C" => self.simrank_decay = value.parse().map_err(|e| bad(&e))?,
            "simrank_iters" => self.simrank_iters = value.parse().map_err(|e| bad(&e))?,
            "simrank_max_nodes" => self.simrank_max_nodes = value.parse().map_err(|e| bad(&e))?,
            "rwr_tol" => self.rwr_tol = value.parse().map_err(|e| bad(&e))?,
            "rwr_max_iters" => self.rwr_max_iters = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(bad(&"unknown parameter")),
        }
        self.validate()
    }
}

/// Per-node scores, indexed by [`NodeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Self {
        ScoreVector(values)
    }

    pub fn get(&self, id: NodeId) -> f64 {
        self.0[id.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedNode {
    pub node: NodeId,
    /// `type:label`; stable across representations of the same data.
    pub key: String,
    pub score: f64,
}

/// Same-type answers for one query, best first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ranking {
    pub entries: Vec<RankedNode>,
}

impl Ranking {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.key.as_str()).collect()
    }

    /// The first `k` entries.
    pub fn truncated(&self, k: usize) -> Ranking {
        Ranking {
            entries: self.entries.iter().take(k).cloned().collect(),
        }
    }
}

/// The `k` best nodes of the query's type, excluding the query itself.
/// Scores descend; equal scores are ordered by ascending label.
pub fn rank_topk(scores: &ScoreVector, g: &TypedGraph, q: NodeId, k: usize) -> Ranking {
    let qtype = g.ntype(q);
    let mut candidates: Vec<NodeId> = g
        .nodes_of_type(qtype)
        .into_iter()
        .filter(|&n| n != q)
        .collect();
    // nodes_of_type is label-sorted and the sort is stable
    candidates.sort_by(|&a, &b| scores.get(b).total_cmp(&scores.get(a)));
    candidates.truncate(k);
    Ranking {
        entries: candidates
            .into_iter()
            .map(|n| RankedNode {
                node: n,
                key: g.describe(n),
                score: scores.get(n),
            })
            .collect(),
    }
}
