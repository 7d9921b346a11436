//! Bundled reference data.

use crate::graph::{load_edge_list, load_labels, Graph, GroundTruth};

pub const KARATE_EDGES: &str = include_str!("../data/karate.edges");
pub const KARATE_LABELS: &str = include_str!("../data/karate.labels");

/// Zachary's karate club with the two-faction split observed after the club
/// broke up. Node ids follow the interning order of the bundled edge file, so
/// results match those obtained by loading `data/karate.edges` directly.
pub fn builtin_karate() -> (Graph, GroundTruth) {
    let (graph, _) = load_edge_list(KARATE_EDGES).expect("bundled karate edge list parses");
    let (truth, _) = load_labels(KARATE_LABELS).expect("bundled karate labels parse");
    (graph, truth)
}
