//! Asynchronous label propagation baseline.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpaConfig {
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for LpaConfig {
    fn default() -> Self {
        LpaConfig {
            seed: 0,
            max_iterations: 100,
        }
    }
}

impl LpaConfig {
    pub fn with_seed(seed: u64) -> Self {
        LpaConfig {
            seed,
            ..Self::default()
        }
    }
}

/// Every node starts with its own label. Each sweep visits the nodes in a
/// fresh seeded permutation and sets each one to the most frequent label
/// among its neighbors, the smallest label winning ties. Stops after a sweep
/// with no change or after `max_iterations` sweeps.
pub fn lpa(g: &Graph, cfg: &LpaConfig) -> Partition {
    let n = g.node_count();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<NodeId> = g.nodes().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // counts indexed by label, reset after each node
    let mut counts = vec![0usize; n];

    for _ in 0..cfg.max_iterations.max(1) {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            let neighbors = g.adj(v);
            if neighbors.is_empty() {
                continue;
            }
            let mut best = (0usize, usize::MAX);
            for &u in neighbors {
                let l = labels[u.index()];
                counts[l] += 1;
                let c = counts[l];
                if c > best.0 || (c == best.0 && l < best.1) {
                    best = (c, l);
                }
            }
            for &u in neighbors {
                counts[labels[u.index()]] = 0;
            }
            if labels[v.index()] != best.1 {
                labels[v.index()] = best.1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Partition::from_labels(&labels)
}

pub fn lpa_seeds(g: &Graph, base: &LpaConfig, seeds: &[u64]) -> Vec<Partition> {
    crate::parallel::map_collect(seeds, |&seed| lpa(g, &LpaConfig { seed, ..*base }))
}

pub fn lpa_seeds_sequential(g: &Graph, base: &LpaConfig, seeds: &[u64]) -> Vec<Partition> {
    crate::parallel::map_collect_sequential(seeds, |&seed| lpa(g, &LpaConfig { seed, ..*base }))
}
