//! Random walk with restart by power iteration.

use crate::graph::{NodeId, TypedGraph};

use super::{AlgorithmParams, ScoreVector, SimilarityError};

#[derive(Debug, Clone)]
pub struct RwrRun {
    pub scores: ScoreVector,
    pub iterations: usize,
    /// L1 change of each sweep, in order.
    pub deltas: Vec<f64>,
}

/// Iterates `r <- (1-c) W r + c e_q` from `r = e_q`, where `W` is the
/// column-normalized adjacency and isolated nodes send their mass to `q`.
pub fn rwr_run(g: &TypedGraph, q: NodeId, p: &AlgorithmParams) -> Result<RwrRun, SimilarityError> {
    p.validate()?;
    if g.is_empty() {
        return Err(SimilarityError::EmptyGraph);
    }
    g.node(q)?;
    let n = g.node_count();
    let c = p.restart_prob;
    let inv_deg: Vec<f64> = g
        .node_ids()
        .map(|u| match g.degree(u) {
            0 => 0.0,
            d => 1.0 / d as f64,
        })
        .collect();

    let mut r = vec![0.0; n];
    r[q.index()] = 1.0;
    let mut next = vec![0.0; n];
    let mut deltas = Vec::new();
    for _ in 0..p.rwr_max_iters {
        let dangling: f64 = g
            .node_ids()
            .filter(|&u| g.degree(u) == 0)
            .map(|u| r[u.index()])
            .sum();
        for v in g.node_ids() {
            let inflow: f64 = g
                .adjacent(v)
                .iter()
                .map(|u| r[u.index()] * inv_deg[u.index()])
                .sum();
            next[v.index()] = (1.0 - c) * inflow;
        }
        next[q.index()] += c + (1.0 - c) * dangling;
        let delta: f64 = r.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut r, &mut next);
        deltas.push(delta);
        if delta < p.rwr_tol {
            break;
        }
    }
    Ok(RwrRun {
        scores: ScoreVector::new(r),
        iterations: deltas.len(),
        deltas,
    })
}

pub fn rwr_scores(
    g: &TypedGraph,
    q: NodeId,
    p: &AlgorithmParams,
) -> Result<ScoreVector, SimilarityError> {
    rwr_run(g, q, p).map(|run| run.scores)
}
