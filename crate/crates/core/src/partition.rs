//! Node-to-community assignments and their file formats.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GroundTruth, NodeId};

/// Disjoint communities over the nodes `0..n`, plus the nodes not yet placed.
///
/// Communities are kept sorted, and in canonical form they are ordered by
/// their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<Option<usize>>,
    communities: Vec<Vec<NodeId>>,
    unassigned: BTreeSet<NodeId>,
}

impl Partition {
    /// Every node unassigned.
    pub fn empty(node_count: usize) -> Self {
        Partition {
            assignment: vec![None; node_count],
            communities: Vec::new(),
            unassigned: (0..node_count).map(NodeId::from).collect(),
        }
    }

    /// Builds a partition from node sets in the given order. Empty sets are
    /// dropped. Fails if a node is out of range or appears twice.
    pub fn from_communities(node_count: usize, communities: Vec<Vec<NodeId>>) -> Result<Self> {
        let mut assignment = vec![None; node_count];
        let mut kept = Vec::with_capacity(communities.len());
        for mut members in communities {
            if members.is_empty() {
                continue;
            }
            members.sort_unstable();
            let idx = kept.len();
            for &v in &members {
                let slot = assignment.get_mut(v.index()).ok_or_else(|| {
                    Error::NodeSetMismatch(format!("node {v} outside 0..{node_count}"))
                })?;
                if slot.is_some() {
                    return Err(Error::NodeSetMismatch(format!(
                        "node {v} is in more than one community"
                    )));
                }
                *slot = Some(idx);
            }
            kept.push(members);
        }
        let unassigned = assignment
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(i, _)| NodeId::from(i))
            .collect();
        Ok(Partition {
            assignment,
            communities: kept,
            unassigned,
        })
    }

    /// Groups nodes by an arbitrary per-node label, canonically ordered.
    pub fn from_labels<L: Ord>(labels: &[L]) -> Self {
        let mut groups: BTreeMap<&L, Vec<NodeId>> = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(NodeId::from(i));
        }
        let mut p = Partition::from_communities(labels.len(), groups.into_values().collect())
            .expect("label groups are disjoint");
        p.canonicalize();
        p
    }

    /// Orders communities by smallest member id and renumbers the assignment.
    pub fn canonicalize(&mut self) {
        self.communities.retain(|c| !c.is_empty());
        for c in &mut self.communities {
            c.sort_unstable();
        }
        self.communities.sort_by_key(|c| c[0]);
        for (idx, c) in self.communities.iter().enumerate() {
            for &v in c {
                self.assignment[v.index()] = Some(idx);
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn communities(&self) -> &[Vec<NodeId>] {
        &self.communities
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn unassigned(&self) -> &BTreeSet<NodeId> {
        &self.unassigned
    }

    pub fn community_of(&self, v: NodeId) -> Option<usize> {
        self.assignment.get(v.index()).copied().flatten()
    }

    pub fn is_cover(&self) -> bool {
        self.unassigned.is_empty()
    }

    /// Per-node community index; `None` unless the partition covers every node.
    pub fn labels(&self) -> Option<Vec<usize>> {
        self.assignment.iter().copied().collect()
    }

    /// Places `v` (currently unassigned) into community `idx`.
    pub(crate) fn assign(&mut self, v: NodeId, idx: usize) {
        debug_assert!(self.assignment[v.index()].is_none());
        self.assignment[v.index()] = Some(idx);
        self.unassigned.remove(&v);
        let members = &mut self.communities[idx];
        let pos = members.binary_search(&v).unwrap_err();
        members.insert(pos, v);
    }

    /// Opens a new community holding only `v`.
    pub(crate) fn add_singleton(&mut self, v: NodeId) {
        let idx = self.communities.len();
        self.communities.push(Vec::new());
        self.assign(v, idx);
    }

    /// Checks the structural invariants: communities are disjoint, sorted and
    /// nonempty, agree with the assignment, and together with the unassigned
    /// set cover every node exactly once.
    pub fn check_invariants(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        for (idx, c) in self.communities.iter().enumerate() {
            if c.is_empty() || c.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &v in c {
                if v.index() >= n || seen[v.index()] || self.assignment[v.index()] != Some(idx) {
                    return false;
                }
                seen[v.index()] = true;
            }
        }
        for &v in &self.unassigned {
            if v.index() >= n || seen[v.index()] || self.assignment[v.index()].is_some() {
                return false;
            }
            seen[v.index()] = true;
        }
        seen.iter().all(|&s| s)
    }

    /// Whether communities appear in smallest-member order.
    pub fn is_canonical(&self) -> bool {
        self.communities.windows(2).all(|w| w[0][0] < w[1][0])
    }

    /// Resolves ground-truth labels against `g`. Every graph node must be
    /// labelled and every labelled node must exist.
    pub fn from_ground_truth(g: &Graph, truth: &GroundTruth) -> Result<Self> {
        let mut labels = vec![None; g.node_count()];
        for (node, label) in &truth.labels {
            let id = g.node_id_or_err(node)?;
            labels[id.index()] = Some(label.as_str());
        }
        let labels = complete(g, labels)?;
        Ok(Partition::from_labels(&labels))
    }

    /// `node<TAB>community` lines in node order, communities numbered
    /// canonically.
    pub fn to_tsv(&self, g: &Graph) -> String {
        let mut canon = self.clone();
        canon.canonicalize();
        let mut out = String::new();
        for v in g.nodes() {
            if let Some(c) = canon.community_of(v) {
                out.push_str(g.label(v));
                out.push('\t');
                out.push_str(&c.to_string());
                out.push('\n');
            }
        }
        out
    }

    /// Parses the TSV format against `g`. Unknown nodes and nodes left
    /// without a community are both errors. Community indices in the file
    /// may be any tokens; the result is canonical.
    pub fn from_tsv(g: &Graph, text: &str) -> Result<Self> {
        let mut labels: Vec<Option<String>> = vec![None; g.node_count()];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!(
                        "expected `node<TAB>community`, found {} tokens",
                        tokens.len()
                    ),
                });
            }
            let id = g.node_id_or_err(tokens[0])?;
            labels[id.index()] = Some(tokens[1].to_owned());
        }
        let labels = complete(g, labels)?;
        Ok(Partition::from_labels(&labels))
    }

    pub fn to_document(&self, g: &Graph, seed: u64, algorithm: &str) -> PartitionDocument {
        let mut canon = self.clone();
        canon.canonicalize();
        PartitionDocument {
            communities: canon
                .communities
                .iter()
                .map(|c| c.iter().map(|&v| g.label(v).to_owned()).collect())
                .collect(),
            seed,
            algorithm: algorithm.to_owned(),
        }
    }

    pub fn to_json(&self, g: &Graph, seed: u64, algorithm: &str) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document(g, seed, algorithm))
            .expect("partition document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(g: &Graph, text: &str) -> Result<Self> {
        let doc: PartitionDocument = serde_json::from_str(text)?;
        let mut communities = Vec::with_capacity(doc.communities.len());
        for c in &doc.communities {
            communities.push(
                c.iter()
                    .map(|label| g.node_id_or_err(label))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let mut p = Partition::from_communities(g.node_count(), communities)?;
        if !p.is_cover() {
            return Err(missing_nodes(g, p.unassigned.iter().copied()));
        }
        p.canonicalize();
        Ok(p)
    }
}

fn complete<T>(g: &Graph, labels: Vec<Option<T>>) -> Result<Vec<T>> {
    let missing: Vec<NodeId> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_none())
        .map(|(i, _)| NodeId::from(i))
        .collect();
    if !missing.is_empty() {
        return Err(missing_nodes(g, missing.into_iter()));
    }
    Ok(labels.into_iter().flatten().collect())
}

fn missing_nodes(g: &Graph, missing: impl Iterator<Item = NodeId>) -> Error {
    let missing: Vec<&str> = missing.map(|v| g.label(v)).collect();
    let shown = missing
        .iter()
        .take(5)
        .copied()
        .collect::<Vec<_>>()
        .join(", ");
    Error::NodeSetMismatch(format!(
        "{} node(s) without a community (e.g. {shown})",
        missing.len()
    ))
}

/// JSON form of a partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionDocument {
    pub communities: Vec<Vec<String>>,
    pub seed: u64,
    pub algorithm: String,
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Merges every pair of sets that share a node, transitively. The output sets
/// are disjoint, sorted, and ordered by smallest member.
pub fn merge_overlapping(communities: &[Vec<NodeId>]) -> Vec<Vec<NodeId>> {
    let Some(max) = communities.iter().flatten().map(|v| v.index()).max() else {
        return Vec::new();
    };
    let mut sets = DisjointSet::new(max + 1);
    let mut present = vec![false; max + 1];
    for c in communities {
        for &v in c {
            present[v.index()] = true;
            sets.union(c[0].index(), v.index());
        }
    }
    let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    let mut root_min: Vec<Option<usize>> = vec![None; max + 1];
    // ascending scan: a root's first sighting is its smallest member
    for v in (0..=max).filter(|&v| present[v]) {
        let r = sets.find(v);
        let first = *root_min[r].get_or_insert(v);
        groups.entry(first).or_default().push(NodeId::from(v));
    }
    groups.into_values().collect()
}
