//! Cascade-based disjoint community detection.
//!
//! The crate provides
//!
//! * [`graph`]: undirected simple graphs, edge-list and label loaders;
//! * [`tie_strength`]: the Neighborhood Similarity tie strength;
//! * [`dcc`]: cascade generation, preferential membership and merging;
//! * [`lpa`]: a label propagation baseline;
//! * [`metrics`]: NGM, modularity density, Z-modularity, cut ratio, NMI, ARI;
//! * [`bench`]: manifest-driven benchmark runs and CSV/JSON reports.
//!
//! Data-parallel work (tie-strength tables, multi-seed sweeps, benchmark
//! triples) uses rayon behind the default `parallel` feature. Disabling it
//! gives identical results on one thread.

pub mod bench;
pub mod datasets;
pub mod dcc;
pub mod error;
pub mod graph;
pub mod lpa;
pub mod metrics;
pub mod parallel;
pub mod partition;
pub mod tie_strength;

pub use datasets::builtin_karate;
pub use dcc::{dcc, Cascade, RunConfig};
pub use error::{Error, Result};
pub use graph::{load_edge_list, load_labels, Graph, GroundTruth, NodeId};
pub use lpa::{lpa, LpaConfig};
pub use metrics::{EvalReport, Metric, MetricValues};
pub use partition::{merge_overlapping, Partition};
pub use tie_strength::{NsCache, TieStrength};

/// Identifies the set of interpretation choices baked into the algorithms
/// (tie-strength terms, cascade acceptance, membership scoring, metric
/// variants). Bumped whenever any of them changes results.
pub const DECISIONS_VERSION: &str = "dcc-decisions/1";
