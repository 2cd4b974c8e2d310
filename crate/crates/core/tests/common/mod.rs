#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use rand::Rng;
use repind_core::similarity::MetaPath;
use repind_core::{NodeId, NodeType, TypedGraph};

pub const TYPE_NAMES: [&str; 4] = ["A", "P", "C", "Y"];

/// A graph as plain data: the type index of each node and an edge list.
#[derive(Debug, Clone)]
pub struct Parts {
    pub types: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

pub fn build(parts: &Parts) -> TypedGraph {
    let mut g = TypedGraph::new();
    let ids: Vec<NodeId> = parts
        .types
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            g.add_node(&NodeType::new(TYPE_NAMES[t]).unwrap(), &format!("n{i:02}"))
                .unwrap()
        })
        .collect();
    for &(u, v) in &parts.edges {
        g.add_edge(ids[u], ids[v]).unwrap();
    }
    g
}

/// `n` nodes over the first `n_types` types (each present when `n` allows),
/// every pair linked with probability `density`.
pub fn random_parts(rng: &mut impl Rng, n: usize, n_types: usize, density: f64) -> Parts {
    let types = (0..n)
        .map(|i| {
            if i < n_types {
                i
            } else {
                rng.gen_range(0..n_types)
            }
        })
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Parts { types, edges }
}

pub fn arb_parts(max_n: usize, n_types: usize) -> impl Strategy<Value = Parts> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        (
            proptest::collection::vec(0..n_types, n),
            proptest::collection::vec(any::<bool>(), m),
        )
            .prop_map(move |(mut types, bits)| {
                for (i, t) in types.iter_mut().enumerate().take(n_types) {
                    *t = i;
                }
                let edges = pairs
                    .iter()
                    .zip(&bits)
                    .filter(|(_, &b)| b)
                    .map(|(&e, _)| e)
                    .collect();
                Parts { types, edges }
            })
    })
}

fn neighbor_lists(g: &TypedGraph) -> Vec<Vec<usize>> {
    g.node_ids()
        .map(|u| g.adjacent(u).iter().map(|v| v.index()).collect())
        .collect()
}

/// SimRank straight from its recurrence, one pair at a time.
pub fn simrank_naive(g: &TypedGraph, decay: f64, iters: usize) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let nb = neighbor_lists(g);
    let mut s: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..iters {
        let mut next = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    next[a][b] = 1.0;
                    continue;
                }
                if nb[a].is_empty() || nb[b].is_empty() {
                    continue;
                }
                let mut total = 0.0;
                for &i in &nb[a] {
                    for &j in &nb[b] {
                        total += s[i][j];
                    }
                }
                next[a][b] = decay * total / (nb[a].len() * nb[b].len()) as f64;
            }
        }
        s = next;
    }
    s
}

/// Solves `(I - (1-c) W) r = c e_q` by Gaussian elimination with partial
/// pivoting. Columns of isolated nodes point at `q`.
pub fn rwr_dense(g: &TypedGraph, q: usize, c: f64) -> Vec<f64> {
    let n = g.node_count();
    let nb = neighbor_lists(g);
    let mut a = vec![vec![0.0; n + 1]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for j in 0..n {
        if nb[j].is_empty() {
            a[q][j] -= 1.0 - c;
        } else {
            for &i in &nb[j] {
                a[i][j] -= (1.0 - c) / nb[j].len() as f64;
            }
        }
    }
    a[q][n] = c;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for k in col..=n {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// Walk counts along `mp` from every node, by depth-first enumeration.
pub fn walk_counts_dfs(g: &TypedGraph, mp: &MetaPath) -> HashMap<(usize, usize), u64> {
    fn go(
        g: &TypedGraph,
        steps: &[NodeType],
        start: usize,
        at: NodeId,
        out: &mut HashMap<(usize, usize), u64>,
    ) {
        let Some((next, rest)) = steps.split_first() else {
            *out.entry((start, at.index())).or_default() += 1;
            return;
        };
        for &v in g.adjacent(at) {
            if g.ntype(v) == next {
                go(g, rest, start, v, out);
            }
        }
    }
    let mut out = HashMap::new();
    for u in g.node_ids() {
        if g.ntype(u) == mp.first() {
            go(g, &mp.steps()[1..], u.index(), u, &mut out);
        }
    }
    out
}

/// Pairs of the top-k distance, enumerated case by case: returns the number
/// of pairs charged 1 and the number charged the penalty.
pub fn kendall_pairs(r1: &[u32], r2: &[u32]) -> (u64, u64) {
    let pos =
        |r: &[u32]| -> HashMap<u32, usize> { r.iter().enumerate().map(|(i, &x)| (x, i)).collect() };
    let (p1, p2) = (pos(r1), pos(r2));
    let mut union: Vec<u32> = r1
        .iter()
        .chain(r2)
        .copied()
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    union.sort_unstable();
    let (mut whole, mut penalized) = (0, 0);
    for (x, &i) in union.iter().enumerate() {
        for &j in &union[x + 1..] {
            let in1 = (p1.get(&i), p1.get(&j));
            let in2 = (p2.get(&i), p2.get(&j));
            match (in1, in2) {
                ((Some(a1), Some(b1)), (Some(a2), Some(b2))) => {
                    if (a1 < b1) != (a2 < b2) {
                        whole += 1;
                    }
                }
                ((Some(a), Some(b)), (Some(_), None)) | ((Some(b), Some(a)), (None, Some(_))) => {
                    // the other list holds one of the pair and so ranks it ahead
                    if b < a {
                        whole += 1;
                    }
                }
                ((Some(_), None), (Some(a), Some(b))) | ((None, Some(_)), (Some(b), Some(a))) => {
                    if b < a {
                        whole += 1;
                    }
                }
                ((Some(_), None), (None, Some(_))) | ((None, Some(_)), (Some(_), None)) => {
                    whole += 1
                }
                ((Some(_), Some(_)), (None, None)) | ((None, None), (Some(_), Some(_))) => {
                    penalized += 1
                }
                _ => {}
            }
        }
    }
    (whole, penalized)
}

pub fn arb_topk_pair(max_k: usize, universe: u32) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (0..=max_k).prop_flat_map(move |k| {
        let list = Just((0..universe).collect::<Vec<u32>>())
            .prop_shuffle()
            .prop_map(move |v| v[..k].to_vec());
        (list.clone(), list)
    })
}

pub fn random_topk_pair(rng: &mut impl Rng, max_k: usize, universe: u32) -> (Vec<u32>, Vec<u32>) {
    use rand::seq::SliceRandom;
    let k = rng.gen_range(0..=max_k);
    let mut pick = || {
        let mut v: Vec<u32> = (0..universe).collect();
        v.shuffle(rng);
        v.truncate(k);
        v
    };
    let a = pick();
    (a, pick())
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tolerance {tol})");
}

/// Worst absolute gap between `simrank_all` and the naive recurrence.
pub fn simrank_gap(g: &TypedGraph, decay: f64, iters: usize) -> f64 {
    use repind_core::similarity::{simrank_all, AlgorithmParams};
    let params = AlgorithmParams {
        simrank_decay: decay,
        simrank_iters: iters,
        ..Default::default()
    };
    let table = simrank_all(g, &params).unwrap();
    let naive = simrank_naive(g, decay, iters);
    let mut worst = 0.0f64;
    for a in g.node_ids() {
        for b in g.node_ids() {
            worst = worst.max((table.get(a, b) - naive[a.index()][b.index()]).abs());
        }
    }
    worst
}

/// Worst absolute gap between power iteration and the dense solve, over
/// every query node.
pub fn rwr_gap(g: &TypedGraph, c: f64) -> f64 {
    use repind_core::similarity::{rwr_scores, AlgorithmParams};
    let params = AlgorithmParams {
        restart_prob: c,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    for q in g.node_ids() {
        let fast = rwr_scores(g, q, &params).unwrap();
        let exact = rwr_dense(g, q.index(), c);
        for v in g.node_ids() {
            worst = worst.max((fast.get(v) - exact[v.index()]).abs());
        }
    }
    worst
}

/// Compares walk counts and PathSim scores with enumeration; returns a
/// description of the first mismatch.
pub fn pathsim_mismatch(g: &TypedGraph, mp: &MetaPath) -> Option<String> {
    use repind_core::similarity::{path_count, PathSimIndex};
    let table = path_count(g, mp).unwrap();
    let walks = walk_counts_dfs(g, mp);
    let starts: Vec<NodeId> = g.node_ids().filter(|&n| g.ntype(n) == mp.first()).collect();
    let ends: Vec<NodeId> = g.node_ids().filter(|&n| g.ntype(n) == mp.last()).collect();
    for &x in &starts {
        for &y in &ends {
            let want = walks.get(&(x.index(), y.index())).copied().unwrap_or(0);
            if table.get(x, y) != want {
                return Some(format!(
                    "{mp} count {} -> {}: {} vs {want}",
                    g.describe(x),
                    g.describe(y),
                    table.get(x, y)
                ));
            }
        }
    }
    if !mp.is_symmetric() {
        return None;
    }
    let index = PathSimIndex::new(g, mp).unwrap();
    let m = |a: NodeId, b: NodeId| walks.get(&(a.index(), b.index())).copied().unwrap_or(0) as f64;
    for &x in &starts {
        let scores = index.scores(g, x).unwrap();
        for &y in &starts {
            let denom = m(x, x) + m(y, y);
            let want = if denom == 0.0 {
                0.0
            } else {
                2.0 * m(x, y) / denom
            };
            let got = scores.get(y);
            if (got - want).abs() > 1e-12 || !(0.0..=1.0).contains(&got) {
                return Some(format!(
                    "{mp} score {} -> {}: {got} vs {want}",
                    g.describe(x),
                    g.describe(y)
                ));
            }
        }
    }
    None
}

/// A random path of up to `max_half` steps followed by its mirror image.
pub fn symmetric_metapath(rng: &mut impl Rng, n_types: usize, max_half: usize) -> MetaPath {
    let half = rng.gen_range(1..=max_half);
    let mut steps: Vec<NodeType> = (0..=half)
        .map(|_| NodeType::new(TYPE_NAMES[rng.gen_range(0..n_types)]).unwrap())
        .collect();
    let back: Vec<NodeType> = steps[..half].iter().rev().cloned().collect();
    steps.extend(back);
    MetaPath::new(steps).unwrap()
}

/// Arbitrary meta-path of 2 to `max_len` steps.
pub fn any_metapath(rng: &mut impl Rng, n_types: usize, max_len: usize) -> MetaPath {
    let len = rng.gen_range(2..=max_len);
    MetaPath::new(
        (0..len)
            .map(|_| NodeType::new(TYPE_NAMES[rng.gen_range(0..n_types)]).unwrap())
            .collect(),
    )
    .unwrap()
}
