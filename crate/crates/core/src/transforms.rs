//! Invertible structural rewrites between equivalent graph representations.
//!
//! Each [`Transformation`] pairs a forward rewrite with its inverse and a
//! step rule that carries meta-paths across the two representations.
//! Rewrites are pure: they read one graph and build a new one. Original
//! nodes keep their `(type, label)` identity and fresh nodes receive
//! `~`-prefixed labels numbered in label order of the matched pattern.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{graph_equal, GraphError, NodeId, NodeType, TypedGraph};
use crate::similarity::MetaPath;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("not invertible: edge {0} is not covered by any film/actor/character triangle")]
    NotInvertible(String),
    #[error("malformed star node {0}")]
    MalformedStar(String),
    #[error("malformed group node {0}")]
    MalformedGroup(String),
    #[error("ambiguous membership: {0}")]
    AmbiguousMembership(String),
    #[error("fresh node type {0} already occurs in the input graph")]
    TypeInUse(NodeType),
    #[error("unknown type binding: {0}")]
    UnknownType(String),
    #[error("invalid type bindings: {0}")]
    InvalidBindings(String),
    #[error("no equivalent meta-path for {0}")]
    NoEquivalentMetaPath(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Label of the `index`-th fresh node created by one rewrite.
pub fn fresh_label(index: usize) -> String {
    format!("~{index:06}")
}

fn edge_key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn ensure_unused(g: &TypedGraph, t: &NodeType) -> Result<(), TransformError> {
    if g.has_type(t) {
        return Err(TransformError::TypeInUse(t.clone()));
    }
    Ok(())
}

/// Replaces every (film, actor, character) triangle by a fresh `star` node
/// linked to the three corners. Edges that belonged to some triangle are
/// removed; every other node and edge is copied unchanged.
///
/// Fails with [`TransformError::NotInvertible`] when a film–actor,
/// film–character or actor–character edge lies in no triangle.
pub fn triangle_to_star(
    g: &TypedGraph,
    film: &NodeType,
    actor: &NodeType,
    character: &NodeType,
    star: &NodeType,
) -> Result<TypedGraph, TransformError> {
    ensure_unused(g, star)?;
    let mut triangles = Vec::new();
    let mut covered = HashSet::new();
    for f in g.nodes_of_type(film) {
        for &a in g.adjacent(f).iter().filter(|&&n| g.ntype(n) == actor) {
            for &c in g.adjacent(f).iter().filter(|&&n| g.ntype(n) == character) {
                if g.has_edge(a, c) {
                    triangles.push([f, a, c]);
                    covered.extend([edge_key(f, a), edge_key(f, c), edge_key(a, c)]);
                }
            }
        }
    }

    let bound = [film, actor, character];
    let mut uncovered: Vec<String> = g
        .edges()
        .filter(|&(u, v)| {
            let (tu, tv) = (g.ntype(u), g.ntype(v));
            tu != tv && bound.contains(&tu) && bound.contains(&tv)
        })
        .filter(|&(u, v)| !covered.contains(&edge_key(u, v)))
        .map(|(u, v)| {
            let (a, b) = (g.describe(u), g.describe(v));
            if a <= b {
                format!("{a} -- {b}")
            } else {
                format!("{b} -- {a}")
            }
        })
        .collect();
    uncovered.sort();
    if let Some(edge) = uncovered.into_iter().next() {
        return Err(TransformError::NotInvertible(edge));
    }

    let (mut out, remap) = g.filtered(|_| true, |u, v| !covered.contains(&edge_key(u, v)));
    for (i, corners) in triangles.iter().enumerate() {
        let s = out.add_node(star, &fresh_label(i))?;
        for n in corners {
            out.add_edge(s, remap[n.index()].expect("all nodes kept"))?;
        }
    }
    Ok(out)
}

/// Inverse of [`triangle_to_star`]: every star node is replaced by the three
/// pairwise edges among its neighbors.
pub fn star_to_triangle(
    g: &TypedGraph,
    film: &NodeType,
    actor: &NodeType,
    character: &NodeType,
    star: &NodeType,
) -> Result<TypedGraph, TransformError> {
    let stars = g.nodes_of_type(star);
    let mut corners = Vec::with_capacity(stars.len());
    for &s in &stars {
        let nbrs = g.adjacent(s);
        let pick = |t: &NodeType| {
            let mut it = nbrs.iter().filter(|&&n| g.ntype(n) == t);
            match (it.next(), it.next()) {
                (Some(&n), None) => Some(n),
                _ => None,
            }
        };
        match (nbrs.len(), pick(film), pick(actor), pick(character)) {
            (3, Some(f), Some(a), Some(c)) => corners.push([f, a, c]),
            _ => {
                let types: Vec<String> = nbrs.iter().map(|&n| g.ntype(n).to_string()).collect();
                return Err(TransformError::MalformedStar(format!(
                    "{} (neighbor types [{}])",
                    g.describe(s),
                    types.join(",")
                )));
            }
        }
    }
    let (mut out, remap) = g.filtered(|n| g.ntype(n) != star, |_, _| true);
    for [f, a, c] in corners {
        let [f, a, c] = [f, a, c].map(|n| remap[n.index()].expect("corners are kept"));
        out.add_edge(f, a)?;
        out.add_edge(f, c)?;
        out.add_edge(a, c)?;
    }
    Ok(out)
}

/// Interposes one fresh `group` node between each hub and all of its leaf
/// neighbors. Hubs without leaves are left alone.
pub fn group_neighbors(
    g: &TypedGraph,
    hub: &NodeType,
    leaf: &NodeType,
    group: &NodeType,
) -> Result<TypedGraph, TransformError> {
    ensure_unused(g, group)?;
    let is_hub_leaf = |u: NodeId, v: NodeId| {
        let (tu, tv) = (g.ntype(u), g.ntype(v));
        (tu == hub && tv == leaf) || (tu == leaf && tv == hub)
    };
    let (mut out, remap) = g.filtered(|_| true, |u, v| !is_hub_leaf(u, v));
    let mut count = 0;
    for h in g.nodes_of_type(hub) {
        let leaves: Vec<NodeId> = g
            .adjacent(h)
            .iter()
            .copied()
            .filter(|&n| g.ntype(n) == leaf)
            .collect();
        if leaves.is_empty() {
            continue;
        }
        let grp = out.add_node(group, &fresh_label(count))?;
        count += 1;
        out.add_edge(remap[h.index()].expect("kept"), grp)?;
        for l in leaves {
            out.add_edge(grp, remap[l.index()].expect("kept"))?;
        }
    }
    Ok(out)
}

/// Inverse of [`group_neighbors`]: contracts each group node back into
/// direct hub–leaf edges.
pub fn ungroup(
    g: &TypedGraph,
    hub: &NodeType,
    leaf: &NodeType,
    group: &NodeType,
) -> Result<TypedGraph, TransformError> {
    let mut contractions = Vec::new();
    for grp in g.nodes_of_type(group) {
        let nbrs = g.adjacent(grp);
        let hubs: Vec<NodeId> = nbrs
            .iter()
            .copied()
            .filter(|&n| g.ntype(n) == hub)
            .collect();
        let leaves: Vec<NodeId> = nbrs
            .iter()
            .copied()
            .filter(|&n| g.ntype(n) == leaf)
            .collect();
        if hubs.len() != 1 || leaves.is_empty() || hubs.len() + leaves.len() != nbrs.len() {
            return Err(TransformError::MalformedGroup(format!(
                "{}: {} {hub} neighbor(s), {} {leaf} neighbor(s), {} other",
                g.describe(grp),
                hubs.len(),
                leaves.len(),
                nbrs.len() - hubs.len() - leaves.len()
            )));
        }
        contractions.push((hubs[0], leaves));
    }
    let (mut out, remap) = g.filtered(|n| g.ntype(n) != group, |_, _| true);
    for (h, leaves) in contractions {
        let h = remap[h.index()].expect("kept");
        for l in leaves {
            out.add_edge(h, remap[l.index()].expect("kept"))?;
        }
    }
    Ok(out)
}

/// Adds one fresh `reified` node per distinct (anchor1, anchor2) pair shared
/// by at least one member, linked to both anchors and to those members.
/// Existing edges are kept.
pub fn reify_copair(
    g: &TypedGraph,
    anchor1: &NodeType,
    anchor2: &NodeType,
    member: &NodeType,
    reified: &NodeType,
) -> Result<TypedGraph, TransformError> {
    ensure_unused(g, reified)?;
    let mut pairs: BTreeMap<(&str, &str), (NodeId, NodeId, Vec<NodeId>)> = BTreeMap::new();
    for m in g.nodes_of_type(member) {
        let only = |t: &NodeType| -> Result<NodeId, TransformError> {
            let found: Vec<NodeId> = g
                .adjacent(m)
                .iter()
                .copied()
                .filter(|&n| g.ntype(n) == t)
                .collect();
            match found.as_slice() {
                [n] => Ok(*n),
                _ => Err(TransformError::AmbiguousMembership(format!(
                    "{} has {} {t} neighbor(s), expected exactly 1",
                    g.describe(m),
                    found.len()
                ))),
            }
        };
        let a = only(anchor1)?;
        let b = only(anchor2)?;
        pairs
            .entry((g.label(a), g.label(b)))
            .or_insert_with(|| (a, b, Vec::new()))
            .2
            .push(m);
    }
    let (mut out, remap) = g.filtered(|_| true, |_, _| true);
    let map = |n: NodeId| remap[n.index()].expect("kept");
    for (i, (a, b, members)) in pairs.into_values().enumerate() {
        let r = out.add_node(reified, &fresh_label(i))?;
        out.add_edge(r, map(a))?;
        out.add_edge(r, map(b))?;
        for m in members {
            out.add_edge(map(m), r)?;
        }
    }
    Ok(out)
}

/// Inverse of [`reify_copair`]: deletes every reified node and its edges.
pub fn unreify(
    g: &TypedGraph,
    _anchor1: &NodeType,
    _anchor2: &NodeType,
    _member: &NodeType,
    reified: &NodeType,
) -> Result<TypedGraph, TransformError> {
    Ok(g.filtered(|n| g.ntype(n) != reified, |_, _| true).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Identity,
    Freebase,
    Sigmod,
    L3s,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Identity => "identity",
            TransformKind::Freebase => "freebase",
            TransformKind::Sigmod => "sigmod",
            TransformKind::L3s => "l3s",
        }
    }

    fn roles(self) -> &'static [(&'static str, &'static str)] {
        match self {
            TransformKind::Identity => &[],
            TransformKind::Freebase => &[
                ("film", "F"),
                ("actor", "A"),
                ("character", "C"),
                ("star", "S"),
            ],
            TransformKind::Sigmod => &[("hub", "P"), ("leaf", "A"), ("group", "G")],
            TransformKind::L3s => &[
                ("anchor1", "C"),
                ("anchor2", "Y"),
                ("member", "P"),
                ("reified", "R"),
            ],
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = TransformError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "identity" => Ok(TransformKind::Identity),
            "freebase" => Ok(TransformKind::Freebase),
            "sigmod" => Ok(TransformKind::Sigmod),
            "l3s" => Ok(TransformKind::L3s),
            other => Err(TransformError::InvalidBindings(format!(
                "unknown transformation {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// A named rewrite with its node-type bindings, in one direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transformation {
    kind: TransformKind,
    direction: Direction,
    /// Bound types in the order of `kind.roles()`.
    types: Vec<NodeType>,
}

impl Transformation {
    /// Default bindings: F/A/C/S, P/A/G and C/Y/P/R.
    pub fn new(kind: TransformKind) -> Self {
        let types = kind
            .roles()
            .iter()
            .map(|(_, t)| NodeType::new(*t).expect("default type"))
            .collect();
        Transformation {
            kind,
            direction: Direction::Forward,
            types,
        }
    }

    pub fn identity() -> Self {
        Self::new(TransformKind::Identity)
    }

    pub fn freebase() -> Self {
        Self::new(TransformKind::Freebase)
    }

    pub fn sigmod() -> Self {
        Self::new(TransformKind::Sigmod)
    }

    pub fn l3s() -> Self {
        Self::new(TransformKind::L3s)
    }

    /// Overrides role bindings from `role=Type` pairs, e.g.
    /// `film=F,actor=A,character=C,star=S`. Unlisted roles keep defaults.
    pub fn with_bindings<'a>(
        mut self,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, TransformError> {
        let roles = self.kind.roles();
        for (role, ty) in pairs {
            let slot = roles.iter().position(|(r, _)| *r == role).ok_or_else(|| {
                TransformError::UnknownType(format!(
                    "{role:?} is not a role of the {} transformation",
                    self.kind
                ))
            })?;
            self.types[slot] = NodeType::new(ty)?;
        }
        let distinct: BTreeSet<&NodeType> = self.types.iter().collect();
        if distinct.len() != self.types.len() {
            return Err(TransformError::InvalidBindings(format!(
                "roles of {} must bind distinct types",
                self.kind
            )));
        }
        Ok(self)
    }

    /// Parses `role=Type,role=Type` binding lists.
    pub fn parse_bindings(self, spec: &str) -> Result<Self, TransformError> {
        let mut pairs = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (r, t) = item.split_once('=').ok_or_else(|| {
                TransformError::InvalidBindings(format!("expected role=Type, got {item:?}"))
            })?;
            pairs.push((r.trim(), t.trim()));
        }
        self.with_bindings(pairs)
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// `freebase`, or `freebase^-1` for the inverse direction.
    pub fn name(&self) -> String {
        match self.direction {
            Direction::Forward => self.kind.name().to_string(),
            Direction::Inverse => format!("{}^-1", self.kind.name()),
        }
    }

    pub fn bindings(&self) -> Vec<(&'static str, &NodeType)> {
        self.kind
            .roles()
            .iter()
            .map(|(r, _)| *r)
            .zip(self.types.iter())
            .collect()
    }

    pub fn inverse(&self) -> Self {
        let direction = match (self.kind, self.direction) {
            (TransformKind::Identity, d) => d,
            (_, Direction::Forward) => Direction::Inverse,
            (_, Direction::Inverse) => Direction::Forward,
        };
        Transformation {
            direction,
            ..self.clone()
        }
    }

    pub fn apply(&self, g: &TypedGraph) -> Result<TypedGraph, TransformError> {
        let t = &self.types;
        match (self.kind, self.direction) {
            (TransformKind::Identity, _) => Ok(g.clone()),
            (TransformKind::Freebase, Direction::Forward) => {
                triangle_to_star(g, &t[0], &t[1], &t[2], &t[3])
            }
            (TransformKind::Freebase, Direction::Inverse) => {
                star_to_triangle(g, &t[0], &t[1], &t[2], &t[3])
            }
            (TransformKind::Sigmod, Direction::Forward) => group_neighbors(g, &t[0], &t[1], &t[2]),
            (TransformKind::Sigmod, Direction::Inverse) => ungroup(g, &t[0], &t[1], &t[2]),
            (TransformKind::L3s, Direction::Forward) => reify_copair(g, &t[0], &t[1], &t[2], &t[3]),
            (TransformKind::L3s, Direction::Inverse) => unreify(g, &t[0], &t[1], &t[2], &t[3]),
        }
    }

    /// The fresh type introduced by the forward rewrite.
    fn fresh_type(&self) -> Option<&NodeType> {
        match self.kind {
            TransformKind::Identity => None,
            TransformKind::Sigmod => Some(&self.types[2]),
            TransformKind::Freebase | TransformKind::L3s => Some(&self.types[3]),
        }
    }

    /// Whether the forward rewrite routes the step `a`–`b` through the fresh type.
    fn routes(&self, a: &NodeType, b: &NodeType) -> bool {
        let t = &self.types;
        match self.kind {
            TransformKind::Identity => false,
            TransformKind::Freebase => a != b && t[..3].contains(a) && t[..3].contains(b),
            TransformKind::Sigmod => (a == &t[0] && b == &t[1]) || (a == &t[1] && b == &t[0]),
            TransformKind::L3s => (a == &t[0] && b == &t[2]) || (a == &t[2] && b == &t[0]),
        }
    }

    /// Rewrites a meta-path of the source representation into the target one.
    ///
    /// The translation is `exact` when walk counts correspond one-to-one.
    /// Routing film/actor/character steps through starring nodes is not: an
    /// actor playing two characters in one film has two starring walks to
    /// that film but a single direct edge.
    pub fn translate_metapath(&self, mp: &MetaPath) -> Result<MetaPathTranslation, TransformError> {
        let Some(fresh) = self.fresh_type() else {
            return Ok(MetaPathTranslation {
                path: mp.clone(),
                exact: true,
            });
        };
        let exact = self.kind != TransformKind::Freebase;
        let steps = mp.steps();
        let unmatched =
            || TransformError::NoEquivalentMetaPath(format!("{mp} under {}", self.name()));
        let mut out: Vec<NodeType> = Vec::with_capacity(steps.len() * 2);
        let mut rewritten = false;
        match self.direction {
            Direction::Forward => {
                if steps.contains(fresh) {
                    return Err(unmatched());
                }
                out.push(steps[0].clone());
                for w in steps.windows(2) {
                    if self.routes(&w[0], &w[1]) {
                        out.push(fresh.clone());
                        rewritten = true;
                    }
                    out.push(w[1].clone());
                }
            }
            Direction::Inverse => {
                if steps.first() == Some(fresh) || steps.last() == Some(fresh) {
                    return Err(unmatched());
                }
                let mut i = 0;
                while i < steps.len() {
                    if steps[i] == *fresh {
                        let (a, b) = (&steps[i - 1], steps.get(i + 1).ok_or_else(unmatched)?);
                        if !self.routes(a, b) {
                            return Err(unmatched());
                        }
                        rewritten = true;
                    } else {
                        if self.kind != TransformKind::L3s
                            && i > 0
                            && steps[i - 1] != *fresh
                            && self.routes(&steps[i - 1], &steps[i])
                        {
                            // the forward rewrite deleted every such edge
                            return Err(unmatched());
                        }
                        out.push(steps[i].clone());
                    }
                    i += 1;
                }
            }
        }
        let path = MetaPath::new(out).map_err(|_| unmatched())?;
        Ok(MetaPathTranslation {
            path,
            exact: exact || !rewritten,
        })
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaPathTranslation {
    pub path: MetaPath,
    /// Walk counts of `path` on the target equal those of the source path.
    pub exact: bool,
}

/// Applies `t` then its inverse and compares against the input.
pub fn verify_roundtrip(g: &TypedGraph, t: &Transformation) -> Result<bool, TransformError> {
    let there = t.apply(g)?;
    let back = t.inverse().apply(&there)?;
    Ok(graph_equal(&back, g))
}

/// A set of transformations closed under inverses.
#[derive(Debug, Clone, Default)]
pub struct TransformationFamily {
    members: Vec<Transformation>,
}

impl TransformationFamily {
    /// Both directions of every listed transformation.
    pub fn closure(seed: impl IntoIterator<Item = Transformation>) -> Self {
        let mut members: Vec<Transformation> = Vec::new();
        for t in seed {
            for m in [t.inverse(), t] {
                if !members.contains(&m) {
                    members.push(m);
                }
            }
        }
        members.sort_by(|a, b| {
            (a.kind, a.direction == Direction::Inverse)
                .cmp(&(b.kind, b.direction == Direction::Inverse))
        });
        TransformationFamily { members }
    }

    /// Identity plus both directions of the three schema rewrites with
    /// default bindings.
    pub fn standard() -> Self {
        Self::closure([
            Transformation::identity(),
            Transformation::freebase(),
            Transformation::sigmod(),
            Transformation::l3s(),
        ])
    }

    pub fn members(&self) -> &[Transformation] {
        &self.members
    }

    pub fn is_closed_under_inverse(&self) -> bool {
        self.members
            .iter()
            .all(|t| self.members.contains(&t.inverse()))
    }
}
