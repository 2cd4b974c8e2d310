//! All-pairs SimRank on the undirected adjacency.

use rayon::prelude::*;

use crate::graph::{NodeId, TypedGraph};

use super::{AlgorithmParams, ScoreVector, SimilarityError};

/// Dense symmetric table of pairwise scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRankTable {
    n: usize,
    values: Vec<f64>,
}

impl SimRankTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: NodeId, b: NodeId) -> f64 {
        self.values[a.index() * self.n + b.index()]
    }

    /// Row of `q` as a score vector.
    pub fn scores(&self, q: NodeId) -> ScoreVector {
        let start = q.index() * self.n;
        ScoreVector::new(self.values[start..start + self.n].to_vec())
    }
}

/// Runs `simrank_iters` synchronous sweeps of
/// `s(a,b) = C / (|N(a)| |N(b)|) * sum_{u in N(a), v in N(b)} s(u,v)`
/// starting from the identity, with `s(a,a) = 1` and `s(a,b) = 0` when
/// either node is isolated.
pub fn simrank_all(g: &TypedGraph, p: &AlgorithmParams) -> Result<SimRankTable, SimilarityError> {
    p.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(SimilarityError::EmptyGraph);
    }
    if n > p.simrank_max_nodes {
        return Err(SimilarityError::GraphTooLarge {
            nodes: n,
            cap: p.simrank_max_nodes,
        });
    }
    let adj: Vec<Vec<usize>> = g
        .node_ids()
        .map(|u| g.adjacent(u).iter().map(|v| v.index()).collect())
        .collect();
    let decay = p.simrank_decay;

    let mut s = vec![0.0; n * n];
    for a in 0..n {
        s[a * n + a] = 1.0;
    }
    // partial[u*n + b] = sum over v in N(b) of s(u, v)
    let mut partial = vec![0.0; n * n];
    let mut next = vec![0.0; n * n];
    for _ in 0..p.simrank_iters {
        partial.par_chunks_mut(n).enumerate().for_each(|(u, row)| {
            let srow = &s[u * n..(u + 1) * n];
            for (b, out) in row.iter_mut().enumerate() {
                *out = adj[b].iter().map(|&v| srow[v]).sum();
            }
        });
        next.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
            row[a] = 1.0;
            let na = &adj[a];
            for b in a + 1..n {
                let nb = &adj[b];
                row[b] = if na.is_empty() || nb.is_empty() {
                    0.0
                } else {
                    let total: f64 = na.iter().map(|&u| partial[u * n + b]).sum();
                    decay * total / (na.len() * nb.len()) as f64
                };
            }
        });
        for a in 0..n {
            for b in a + 1..n {
                next[b * n + a] = next[a * n + b];
            }
        }
        std::mem::swap(&mut s, &mut next);
    }
    Ok(SimRankTable { n, values: s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeType;

    fn square() -> TypedGraph {
        let t = NodeType::new("X").unwrap();
        let mut g = TypedGraph::new();
        let ids: Vec<NodeId> = ["a", "b", "c", "d"]
            .iter()
            .map(|l| g.add_node(&t, l).unwrap())
            .collect();
        for i in 0..4 {
            g.add_edge(ids[i], ids[(i + 1) % 4]).unwrap();
        }
        g
    }

    #[test]
    fn square_after_ten_sweeps() {
        // Opposite corners share both neighbors: x <- C (1 + x) / 2.
        // Adjacent corners only ever see adjacent pairs, which start at 0.
        let g = square();
        let p = AlgorithmParams::default();
        let table = simrank_all(&g, &p).unwrap();
        let mut x = 0.0;
        for _ in 0..10 {
            x = p.simrank_decay * (1.0 + x) / 2.0;
        }
        let ids: Vec<NodeId> = g.node_ids().collect();
        assert!((table.get(ids[0], ids[2]) - x).abs() < 1e-12);
        assert!((table.get(ids[1], ids[3]) - x).abs() < 1e-12);
        assert_eq!(table.get(ids[0], ids[1]), 0.0);
        for &a in &ids {
            assert_eq!(table.get(a, a), 1.0);
        }
    }

    #[test]
    fn isolated_nodes_score_zero() {
        let mut g = square();
        let lone = g.add_node(&NodeType::new("X").unwrap(), "lone").unwrap();
        let table = simrank_all(&g, &AlgorithmParams::default()).unwrap();
        assert_eq!(table.get(lone, lone), 1.0);
        for other in g.node_ids().filter(|&n| n != lone) {
            assert_eq!(table.get(lone, other), 0.0);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let p = AlgorithmParams {
            simrank_max_nodes: 3,
            ..Default::default()
        };
        assert!(matches!(
            simrank_all(&square(), &p),
            Err(SimilarityError::GraphTooLarge { nodes: 4, cap: 3 })
        ));
    }
}
