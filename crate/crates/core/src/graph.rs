//! Undirected simple graphs with interned node labels.
//!
//! Node tokens are arbitrary strings. They are interned to dense [`NodeId`]s
//! in order of first appearance, and that order is the one every tie-break in
//! the crate uses.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index. Ordering follows interning order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Immutable undirected simple graph.
///
/// Adjacency lists are sorted ascending, symmetric and free of self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

/// Counters for input lines the loader tolerated but did not keep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadWarnings {
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<Vec<NodeId>>,
    warnings: LoadWarnings,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = NodeId::from(self.labels.len());
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        self.adjacency.push(Vec::new());
        id
    }

    /// Adds an undirected edge. Self-loops are counted and dropped; duplicates
    /// are collapsed when the graph is built.
    pub fn add_edge(&mut self, a: &str, b: &str) {
        let u = self.intern(a);
        let v = self.intern(b);
        self.add_edge_ids(u, v);
    }

    fn add_edge_ids(&mut self, u: NodeId, v: NodeId) {
        if u == v {
            self.warnings.self_loops += 1;
            return;
        }
        self.adjacency[u.index()].push(v);
        self.adjacency[v.index()].push(u);
    }

    pub fn build(self) -> (Graph, LoadWarnings) {
        let mut warnings = self.warnings;
        let mut half_edges = 0usize;
        let mut adjacency = self.adjacency;
        for list in adjacency.iter_mut() {
            let before = list.len();
            list.sort_unstable();
            list.dedup();
            warnings.duplicate_edges += before - list.len();
            half_edges += list.len();
        }
        // every duplicate was counted from both endpoints
        warnings.duplicate_edges /= 2;
        let graph = Graph {
            labels: self.labels,
            index: self.index,
            adjacency,
            edge_count: half_edges / 2,
        };
        (graph, warnings)
    }
}

impl Graph {
    /// Builds a graph over nodes `0..n` labelled by their decimal index.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut builder = GraphBuilder::new();
        for i in 0..n {
            builder.intern(&i.to_string());
        }
        for &(a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} nodes");
            builder.add_edge_ids(NodeId::from(a), NodeId::from(b));
        }
        builder.build().0
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + Clone {
        (0..self.labels.len()).map(NodeId::from)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.adjacency[u.index()]
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.labels.len()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn node_id_or_err(&self, label: &str) -> Result<NodeId> {
        self.node_id(label)
            .ok_or_else(|| Error::UnknownNode(label.to_owned()))
    }

    /// Sorted neighbor list Γ(v). Panics if `v` is out of range.
    #[inline]
    pub fn adj(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    /// Unchecked degree |Γ(v)|.
    #[inline]
    pub fn deg(&self, v: NodeId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.adjacency
            .get(v.index())
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownNode(v.to_string()))
    }

    pub fn degree(&self, v: NodeId) -> Result<usize> {
        self.neighbors(v).map(<[NodeId]>::len)
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.contains(u) && self.contains(v) && self.adj(u).binary_search(&v).is_ok()
    }

    /// |Γ(u) ∩ Γ(v)| by merging the two sorted lists.
    pub fn common_count(&self, u: NodeId, v: NodeId) -> usize {
        intersect_count(self.adj(u), self.adj(v))
    }

    /// Γ(u) ∩ Γ(v), sorted.
    pub fn common_neighbors(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let (a, b) = (self.adj(u), self.adj(v));
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Connected component index per node, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(NodeId::from(s));
            while let Some(u) = stack.pop() {
                for &v in self.adj(u) {
                    if comp[v.index()] == usize::MAX {
                        comp[v.index()] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Canonical edge-list text.
    ///
    /// Lines are emitted so that reloading interns every node in the same
    /// order: each node is first introduced through an edge to an earlier node
    /// (or to its successor when it has none), then the remaining edges follow
    /// in ascending order. Isolated nodes cannot be represented and are lost,
    /// and a node first seen in a self-loop may be interned later on reload.
    pub fn to_edge_list(&self) -> String {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut intro = Vec::new();
        for v in self.nodes() {
            if seen[v.index()] {
                continue;
            }
            let Some(&first) = self.adj(v).first() else {
                continue;
            };
            let edge = if first < v { (first, v) } else { (v, first) };
            seen[edge.0.index()] = true;
            seen[edge.1.index()] = true;
            intro.push(edge);
        }
        let mut out = String::new();
        let mut push = |u: NodeId, v: NodeId| {
            out.push_str(self.label(u));
            out.push(' ');
            out.push_str(self.label(v));
            out.push('\n');
        };
        for &(u, v) in &intro {
            push(u, v);
        }
        intro.sort_unstable();
        for (u, v) in self.edges() {
            if intro.binary_search(&(u, v)).is_err() {
                push(u, v);
            }
        }
        out
    }
}

pub(crate) fn intersect_count(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

/// Parses an edge list: one `u v` pair per line, `#` comments, blank lines
/// ignored.
pub fn load_edge_list(text: &str) -> Result<(Graph, LoadWarnings)> {
    let mut builder = GraphBuilder::new();
    for (line, tokens) in data_lines(text) {
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 node tokens, found {}", tokens.len()),
            });
        }
        builder.add_edge(tokens[0], tokens[1]);
    }
    Ok(builder.build())
}

/// Community labels keyed by node token.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub labels: BTreeMap<String, String>,
}

impl GroundTruth {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, node: &str) -> Option<&str> {
        self.labels.get(node).map(String::as_str)
    }
}

/// Parses `node label` lines. A repeated node overrides its earlier label;
/// the number of overrides is returned alongside.
pub fn load_labels(text: &str) -> Result<(GroundTruth, usize)> {
    let mut truth = GroundTruth::default();
    let mut overrides = 0;
    for (line, tokens) in data_lines(text) {
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected `node label`, found {} tokens", tokens.len()),
            });
        }
        if truth
            .labels
            .insert(tokens[0].to_owned(), tokens[1].to_owned())
            .is_some()
        {
            overrides += 1;
        }
    }
    Ok((truth, overrides))
}
