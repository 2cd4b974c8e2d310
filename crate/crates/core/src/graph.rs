//! Typed, labeled, undirected simple graphs.
//!
//! A node is identified by its `(type, label)` pair; the dense [`NodeId`]
//! handle is an implementation detail of one graph value and never
//! survives a rewrite. Adjacency lists are kept sorted by `(label, type)`
//! so every traversal is a deterministic function of graph content.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node {ntype}:{label}")]
    DuplicateNode { ntype: NodeType, label: String },
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("node not found: {0}")]
    NodeNotFound(String),
    #[error("invalid node: {0}")]
    InvalidNode(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GraphError {
    fn from(e: std::io::Error) -> Self {
        GraphError::Io(e.to_string())
    }
}

/// Short type tag of a node, e.g. `"A"` for actor or `"P"` for paper.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeType(String);

impl NodeType {
    pub fn new(name: impl Into<String>) -> Result<Self, GraphError> {
        let name = name.into();
        if name.is_empty() {
            return Err(GraphError::InvalidNode(
                "node type must be non-empty".into(),
            ));
        }
        if name.contains(|c: char| c == ':' || c == '\t' || c == '\n' || c == '\r') {
            return Err(GraphError::InvalidNode(format!(
                "node type {name:?} contains a reserved character"
            )));
        }
        Ok(NodeType(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for NodeType {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeType::new(s)
    }
}

/// Dense handle into one [`TypedGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub ntype: NodeType,
    pub label: String,
}

impl Node {
    /// `type:label`, the form used by the TSV edge records and the CLI.
    pub fn key(&self) -> String {
        format!("{}:{}", self.ntype, self.label)
    }
}

/// Parses `type:label`, splitting at the first colon.
pub fn parse_node_key(s: &str) -> Result<(NodeType, String), GraphError> {
    let (t, l) = s
        .split_once(':')
        .ok_or_else(|| GraphError::InvalidNode(format!("expected type:label, got {s:?}")))?;
    let t = NodeType::new(t)?;
    check_label(l)?;
    Ok((t, l.to_string()))
}

fn check_label(label: &str) -> Result<(), GraphError> {
    if label.is_empty() {
        return Err(GraphError::InvalidNode("label must be non-empty".into()));
    }
    if label.contains(|c: char| c == '\t' || c == '\n' || c == '\r') {
        return Err(GraphError::InvalidNode(format!(
            "label {label:?} contains a tab or newline"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct TypedGraph {
    nodes: Vec<Node>,
    index: HashMap<NodeType, HashMap<String, NodeId>>,
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl TypedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn add_node(&mut self, ntype: &NodeType, label: &str) -> Result<NodeId, GraphError> {
        check_label(label)?;
        let by_label = self.index.entry(ntype.clone()).or_default();
        if by_label.contains_key(label) {
            return Err(GraphError::DuplicateNode {
                ntype: ntype.clone(),
                label: label.to_string(),
            });
        }
        let id = NodeId(u32::try_from(self.nodes.len()).expect("node count exceeds u32"));
        by_label.insert(label.to_string(), id);
        self.nodes.push(Node {
            ntype: ntype.clone(),
            label: label.to_string(),
        });
        self.adj.push(Vec::new());
        Ok(id)
    }

    /// Adds the undirected edge `{u, v}`. Re-adding an existing edge is a no-op.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::InvalidEdge(format!(
                "self-loop on {}",
                self.describe(u)
            )));
        }
        for n in [u, v] {
            if n.index() >= self.nodes.len() {
                return Err(GraphError::InvalidEdge(format!("missing endpoint {n:?}")));
            }
        }
        match self.search(u, v) {
            Ok(_) => Ok(()),
            Err(pos_u) => {
                self.adj[u.index()].insert(pos_u, v);
                let pos_v = self.search(v, u).unwrap_err();
                self.adj[v.index()].insert(pos_v, u);
                self.edge_count += 1;
                Ok(())
            }
        }
    }

    fn search(&self, from: NodeId, to: NodeId) -> Result<usize, usize> {
        self.adj[from.index()].binary_search_by(|&x| self.cmp_nodes(x, to))
    }

    /// Label-major order used for adjacency lists and tie-breaking.
    pub fn cmp_nodes(&self, a: NodeId, b: NodeId) -> Ordering {
        let (na, nb) = (&self.nodes[a.index()], &self.nodes[b.index()]);
        na.label
            .cmp(&nb.label)
            .then_with(|| na.ntype.cmp(&nb.ntype))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u.index() < self.nodes.len() && v.index() < self.nodes.len() && self.search(u, v).is_ok()
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, GraphError> {
        self.nodes
            .get(id.index())
            .ok_or_else(|| GraphError::NodeNotFound(format!("{id:?}")))
    }

    pub fn ntype(&self, id: NodeId) -> &NodeType {
        &self.nodes[id.index()].ntype
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].label
    }

    pub fn describe(&self, id: NodeId) -> String {
        self.nodes
            .get(id.index())
            .map(Node::key)
            .unwrap_or_else(|| format!("{id:?}"))
    }

    pub fn find(&self, ntype: &NodeType, label: &str) -> Option<NodeId> {
        self.index.get(ntype)?.get(label).copied()
    }

    pub fn find_key(&self, key: &str) -> Result<NodeId, GraphError> {
        let (t, l) = parse_node_key(key)?;
        self.find(&t, &l)
            .ok_or_else(|| GraphError::NodeNotFound(key.to_string()))
    }

    pub fn node_ids(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adj[id.index()].len()
    }

    /// Neighbors in ascending label order, without bounds checking.
    pub fn adjacent(&self, id: NodeId) -> &[NodeId] {
        &self.adj[id.index()]
    }

    pub fn neighbors(
        &self,
        id: NodeId,
        type_filter: Option<&NodeType>,
    ) -> Result<Vec<NodeId>, GraphError> {
        let list = self
            .adj
            .get(id.index())
            .ok_or_else(|| GraphError::NodeNotFound(format!("{id:?}")))?;
        Ok(list
            .iter()
            .copied()
            .filter(|&n| type_filter.is_none_or(|t| self.ntype(n) == t))
            .collect())
    }

    /// All node types present, sorted.
    pub fn types(&self) -> Vec<NodeType> {
        let mut v: Vec<NodeType> = self
            .index
            .iter()
            .filter(|(_, m)| !m.is_empty())
            .map(|(t, _)| t.clone())
            .collect();
        v.sort();
        v
    }

    pub fn has_type(&self, t: &NodeType) -> bool {
        self.index.get(t).is_some_and(|m| !m.is_empty())
    }

    /// Nodes of one type in ascending label order.
    pub fn nodes_of_type(&self, t: &NodeType) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self
            .index
            .get(t)
            .map(|m| m.values().copied().collect())
            .unwrap_or_default();
        v.sort_by(|&a, &b| self.label(a).cmp(self.label(b)));
        v
    }

    pub fn type_count(&self, t: &NodeType) -> usize {
        self.index.get(t).map_or(0, HashMap::len)
    }

    /// Every edge once, as `(u, v)` with `u < v` by id.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.node_ids().flat_map(move |u| {
            self.adj[u.index()]
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Edges keyed by endpoint identity, smaller `(type, label)` first.
    fn edge_keys(&self) -> BTreeSet<((&str, &str), (&str, &str))> {
        self.edges()
            .map(|(u, v)| {
                let a = self.type_label(u);
                let b = self.type_label(v);
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }

    fn type_label(&self, id: NodeId) -> (&str, &str) {
        let n = &self.nodes[id.index()];
        (n.ntype.as_str(), n.label.as_str())
    }

    pub fn load<R: BufRead>(input: R) -> Result<Self, GraphError> {
        let mut g = TypedGraph::new();
        for (i, line) in input.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let perr = |message: String| GraphError::Parse {
                line: lineno,
                message,
            };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["N", t, label] => {
                    let t = NodeType::new(*t).map_err(|e| perr(e.to_string()))?;
                    g.add_node(&t, label).map_err(|e| perr(e.to_string()))?;
                }
                ["E", a, b] => {
                    let u = g.find_key(a).map_err(|e| perr(e.to_string()))?;
                    let v = g.find_key(b).map_err(|e| perr(e.to_string()))?;
                    if g.has_edge(u, v) {
                        return Err(perr(format!("duplicate edge {a} -- {b}")));
                    }
                    g.add_edge(u, v).map_err(|e| perr(e.to_string()))?;
                }
                _ => return Err(perr(format!("malformed record {line:?}"))),
            }
        }
        Ok(g)
    }

    /// Writes the canonical TSV form: nodes sorted by `(type, label)`, then
    /// edges sorted by endpoint pair with the smaller endpoint first.
    pub fn save<W: Write>(&self, mut out: W) -> Result<(), GraphError> {
        let mut nodes: Vec<(&str, &str)> = self.node_ids().map(|n| self.type_label(n)).collect();
        nodes.sort_unstable();
        for (t, l) in nodes {
            writeln!(out, "N\t{t}\t{l}")?;
        }
        for ((t1, l1), (t2, l2)) in self.edge_keys() {
            writeln!(out, "E\t{t1}:{l1}\t{t2}:{l2}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.save(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("graph labels are UTF-8")
    }

    pub fn from_tsv(s: &str) -> Result<Self, GraphError> {
        Self::load(s.as_bytes())
    }

    /// Copies nodes and edges accepted by the filters into a new graph.
    pub(crate) fn filtered(
        &self,
        keep_node: impl Fn(NodeId) -> bool,
        keep_edge: impl Fn(NodeId, NodeId) -> bool,
    ) -> (TypedGraph, Vec<Option<NodeId>>) {
        let mut out = TypedGraph::new();
        let mut remap = vec![None; self.node_count()];
        for id in self.node_ids() {
            if keep_node(id) {
                let n = &self.nodes[id.index()];
                remap[id.index()] = Some(out.add_node(&n.ntype, &n.label).expect("unique source"));
            }
        }
        for (u, v) in self.edges() {
            if let (Some(a), Some(b)) = (remap[u.index()], remap[v.index()]) {
                if keep_edge(u, v) {
                    out.add_edge(a, b).expect("valid source edge");
                }
            }
        }
        (out, remap)
    }
}

/// Identity-based equality: same `(type, label)` node set and same edge set.
pub fn graph_equal(g1: &TypedGraph, g2: &TypedGraph) -> bool {
    if g1.node_count() != g2.node_count() || g1.edge_count() != g2.edge_count() {
        return false;
    }
    let nodes1: BTreeSet<_> = g1.node_ids().map(|n| g1.type_label(n)).collect();
    let nodes2: BTreeSet<_> = g2.node_ids().map(|n| g2.type_label(n)).collect();
    nodes1 == nodes2 && g1.edge_keys() == g2.edge_keys()
}
