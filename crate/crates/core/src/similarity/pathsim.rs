//! Meta-path walk counts and PathSim.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::graph::{NodeId, NodeType, TypedGraph};

use super::{ScoreVector, SimilarityError};

/// A sequence of node types, e.g. `APCPA`.
///
/// Parsed one character per type, or split on `-` when any type name is
/// longer than one character (`Author-Paper-Author`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MetaPath {
    steps: Vec<NodeType>,
}

impl MetaPath {
    pub fn new(steps: Vec<NodeType>) -> Result<Self, SimilarityError> {
        if steps.len() < 2 {
            return Err(SimilarityError::InvalidMetaPath(format!(
                "a meta-path needs at least 2 steps, got {}",
                steps.len()
            )));
        }
        Ok(MetaPath { steps })
    }

    pub fn steps(&self) -> &[NodeType] {
        &self.steps
    }

    pub fn first(&self) -> &NodeType {
        &self.steps[0]
    }

    pub fn last(&self) -> &NodeType {
        &self.steps[self.steps.len() - 1]
    }

    /// True for a path followed by its own reverse, such as `APCPA`. An
    /// even number of steps (`APPA`) does not qualify: its walk counts can
    /// exceed the self-counts and push PathSim above 1.
    pub fn is_symmetric(&self) -> bool {
        self.steps.len() % 2 == 1 && self.steps.iter().eq(self.steps.iter().rev())
    }

    /// Joins `self` and `other` at their shared junction type.
    pub fn concat(&self, other: &MetaPath) -> Result<MetaPath, SimilarityError> {
        if self.last() != other.first() {
            return Err(SimilarityError::InvalidMetaPath(format!(
                "{self} ends at {} but {other} starts at {}",
                self.last(),
                other.first()
            )));
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps[1..].iter().cloned());
        MetaPath::new(steps)
    }
}

impl fmt::Display for MetaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.steps.iter().all(|t| t.as_str().chars().count() == 1) {
            ""
        } else {
            "-"
        };
        let names: Vec<&str> = self.steps.iter().map(NodeType::as_str).collect();
        f.write_str(&names.join(sep))
    }
}

impl FromStr for MetaPath {
    type Err = SimilarityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<String> = if s.contains('-') {
            s.split('-').map(str::to_string).collect()
        } else {
            s.chars().map(String::from).collect()
        };
        let steps = parts
            .into_iter()
            .map(|p| NodeType::new(p).map_err(|e| SimilarityError::InvalidMetaPath(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        MetaPath::new(steps)
    }
}

/// Walk counts between the endpoint types of a meta-path. Rows and columns
/// are the endpoint-type nodes in label order; rows are stored sparsely.
#[derive(Debug, Clone)]
pub struct PathCountTable {
    row_nodes: Vec<NodeId>,
    col_nodes: Vec<NodeId>,
    rows: Vec<Vec<(u32, u64)>>,
    row_pos: HashMap<NodeId, usize>,
    col_pos: HashMap<NodeId, usize>,
}

impl PathCountTable {
    pub fn row_nodes(&self) -> &[NodeId] {
        &self.row_nodes
    }

    pub fn col_nodes(&self) -> &[NodeId] {
        &self.col_nodes
    }

    /// Number of walks from `x` to `y`; 0 for nodes outside the endpoint types.
    pub fn get(&self, x: NodeId, y: NodeId) -> u64 {
        let (Some(&r), Some(&c)) = (self.row_pos.get(&x), self.col_pos.get(&y)) else {
            return 0;
        };
        let row = &self.rows[r];
        row.binary_search_by_key(&(c as u32), |&(col, _)| col)
            .map_or(0, |i| row[i].1)
    }

    /// Non-zero entries of the row of `x`, as `(column node, count)`.
    pub fn row(&self, x: NodeId) -> impl Iterator<Item = (NodeId, u64)> + '_ {
        self.row_pos
            .get(&x)
            .map(|&r| self.rows[r].as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&(c, n)| (self.col_nodes[c as usize], n))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }
}

/// Counts walks whose node types spell out `mp`, as the product of the
/// typed adjacency slices between consecutive steps.
pub fn path_count(g: &TypedGraph, mp: &MetaPath) -> Result<PathCountTable, SimilarityError> {
    for t in mp.steps() {
        if !g.has_type(t) {
            return Err(SimilarityError::UnknownType(t.clone()));
        }
    }
    let row_nodes = g.nodes_of_type(mp.first());
    let col_nodes = g.nodes_of_type(mp.last());
    let n = g.node_count();
    let mut col_of = vec![u32::MAX; n];
    for (i, c) in col_nodes.iter().enumerate() {
        col_of[c.index()] = i as u32;
    }

    let rows = row_nodes
        .par_iter()
        .map_init(
            || vec![0u64; n],
            |acc, &start| {
                let mut frontier = vec![(start, 1u64)];
                for step in &mp.steps()[1..] {
                    let mut touched = Vec::new();
                    for &(u, count) in &frontier {
                        for &v in g.adjacent(u) {
                            if g.ntype(v) != step {
                                continue;
                            }
                            let slot = &mut acc[v.index()];
                            if *slot == 0 {
                                touched.push(v);
                            }
                            *slot = slot
                                .checked_add(count)
                                .ok_or_else(|| SimilarityError::CountOverflow(mp.to_string()))?;
                        }
                    }
                    touched.sort_unstable();
                    frontier = touched
                        .into_iter()
                        .map(|v| (v, std::mem::take(&mut acc[v.index()])))
                        .collect();
                }
                let mut row: Vec<(u32, u64)> = frontier
                    .into_iter()
                    .map(|(v, c)| (col_of[v.index()], c))
                    .collect();
                row.sort_unstable();
                Ok(row)
            },
        )
        .collect::<Result<Vec<_>, SimilarityError>>()?;

    let row_pos = row_nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let col_pos = col_nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    Ok(PathCountTable {
        row_nodes,
        col_nodes,
        rows,
        row_pos,
        col_pos,
    })
}

/// Precomputed walk counts for answering many PathSim queries on one graph.
#[derive(Debug, Clone)]
pub struct PathSimIndex {
    metapath: MetaPath,
    counts: PathCountTable,
    n: usize,
}

impl PathSimIndex {
    pub fn new(g: &TypedGraph, mp: &MetaPath) -> Result<Self, SimilarityError> {
        if !mp.is_symmetric() {
            return Err(SimilarityError::AsymmetricMetaPath(mp.to_string()));
        }
        Ok(PathSimIndex {
            metapath: mp.clone(),
            counts: path_count(g, mp)?,
            n: g.node_count(),
        })
    }

    pub fn counts(&self) -> &PathCountTable {
        &self.counts
    }

    /// `s(q, y) = 2 M(q,y) / (M(q,q) + M(y,y))`, or 0 when the denominator is 0.
    pub fn scores(&self, g: &TypedGraph, q: NodeId) -> Result<ScoreVector, SimilarityError> {
        let node = g.node(q)?;
        if &node.ntype != self.metapath.first() {
            return Err(SimilarityError::TypeMismatch {
                query: node.key(),
                expected: self.metapath.first().clone(),
                actual: node.ntype.clone(),
            });
        }
        let self_count = |x: NodeId| u128::from(self.counts.get(x, x));
        let mqq = self_count(q);
        let mut out = vec![0.0; self.n];
        for (y, m) in self.counts.row(q) {
            let denom = mqq + self_count(y);
            if denom > 0 {
                out[y.index()] = (2 * u128::from(m)) as f64 / denom as f64;
            }
        }
        Ok(ScoreVector::new(out))
    }
}

pub fn pathsim_scores(
    g: &TypedGraph,
    mp: &MetaPath,
    q: NodeId,
) -> Result<ScoreVector, SimilarityError> {
    PathSimIndex::new(g, mp)?.scores(g, q)
}
