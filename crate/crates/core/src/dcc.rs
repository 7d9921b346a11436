//! Disjoint community detection using cascades.
//!
//! A run has three phases:
//!
//! 1. **Cascades.** Starting from a uniformly drawn unprocessed node, a walk
//!    repeatedly moves to the unprocessed neighbor with the strongest tie, as
//!    long as tie strength does not decrease along the walk. Every walk of at
//!    least two nodes becomes a cascade; a walk stuck on its first node leaves
//!    that node processed but unlabelled. By default walks only enter
//!    unprocessed nodes, so cascades are disjoint; with
//!    [`RunConfig::revisit_processed`] they may cross earlier cascades, which
//!    the merge phase then joins.
//! 2. **Preferential membership.** Unlabelled nodes join the neighboring
//!    community with the largest PM score, in synchronous rounds.
//! 3. **Merging.** Communities sharing a node are merged.
//!
//! Randomness comes from a [`ChaCha8Rng`] seeded with [`RunConfig::seed`], so a
//! (graph, config) pair always yields the same partition.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{intersect_count, Graph, NodeId};
use crate::partition::{merge_overlapping, Partition};
use crate::tie_strength::{find_maxts, NsCache, TieStrength};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    /// Only extend cascades across edges with strictly positive tie strength.
    pub require_positive_ns: bool,
    /// Let walks pass through nodes already activated by earlier cascades.
    /// Cascades may then overlap, and the merge phase joins them.
    pub revisit_processed: bool,
    /// Cap on preferential-membership rounds; `None` means the node count.
    pub max_pm_rounds: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            require_positive_ns: true,
            revisit_processed: false,
            max_pm_rounds: None,
        }
    }
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        RunConfig {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CascadeStep {
    pub node: NodeId,
    /// The neighbor this node activated, `None` for the last step.
    pub next: Option<NodeId>,
    pub time: usize,
}

/// One diffusion walk: adjacent, non-repeating nodes joined by edges of
/// non-decreasing tie strength.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    pub steps: Vec<CascadeStep>,
}

impl Cascade {
    fn from_path(path: &[NodeId]) -> Self {
        let steps = path
            .iter()
            .enumerate()
            .map(|(time, &node)| CascadeStep {
                node,
                next: path.get(time + 1).copied(),
                time,
            })
            .collect();
        Cascade { steps }
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        self.steps.iter().map(|s| s.node).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Unprocessed nodes with O(1) removal and deterministic indexed draws.
struct Pool {
    items: Vec<NodeId>,
    pos: Vec<usize>,
}

impl Pool {
    fn full(n: usize) -> Self {
        Pool {
            items: (0..n).map(NodeId::from).collect(),
            pos: (0..n).collect(),
        }
    }

    fn contains(&self, v: &NodeId) -> bool {
        self.pos[v.index()] != usize::MAX
    }

    fn remove(&mut self, v: NodeId) {
        let i = self.pos[v.index()];
        debug_assert!(i != usize::MAX);
        self.items.swap_remove(i);
        if let Some(&moved) = self.items.get(i) {
            self.pos[moved.index()] = i;
        }
        self.pos[v.index()] = usize::MAX;
    }
}

/// Runs the cascade phase. Returns the cascades in creation order and the
/// nodes that ended up in none of them.
pub fn generate_cascades(g: &Graph, cfg: &RunConfig) -> (Vec<Cascade>, BTreeSet<NodeId>) {
    let mut cache = NsCache::precompute(g);
    generate_cascades_with(g, cfg, &mut cache)
}

pub fn generate_cascades_with(
    g: &Graph,
    cfg: &RunConfig,
    cache: &mut NsCache,
) -> (Vec<Cascade>, BTreeSet<NodeId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pool = Pool::full(g.node_count());
    let mut cascades = Vec::new();
    let mut path = Vec::new();

    while !pool.items.is_empty() {
        let start = pool.items[rng.random_range(0..pool.items.len())];
        pool.remove(start);
        path.clear();
        path.push(start);

        let mut current = start;
        let mut prev = TieStrength::zero();
        loop {
            let candidates = g.adj(current).iter().copied().filter(|&v| {
                if cfg.revisit_processed {
                    !path.contains(&v)
                } else {
                    pool.contains(&v)
                }
            });
            let best = find_maxts(g, current, candidates, cache)
                .expect("candidates are neighbors of the current node");
            let Some((next, ts)) = best else { break };
            if ts < prev || (cfg.require_positive_ns && ts.is_zero()) {
                break;
            }
            if pool.contains(&next) {
                pool.remove(next);
            }
            path.push(next);
            prev = ts;
            current = next;
        }

        if path.len() > 1 {
            cascades.push(Cascade::from_path(&path));
        }
    }
    // with revisits a failed start may still be reached by a later walk
    let mut in_cascade = vec![false; g.node_count()];
    for c in &cascades {
        for s in &c.steps {
            in_cascade[s.node.index()] = true;
        }
    }
    let leftover = g.nodes().filter(|v| !in_cascade[v.index()]).collect();
    (cascades, leftover)
}

fn membership_term_numerator(g: &Graph, p: NodeId, q: NodeId) -> usize {
    let gp = g.adj(p);
    g.adj(q)
        .iter()
        .filter(|&&x| x != p)
        .map(|&x| intersect_count(gp, g.adj(x)))
        .sum()
}

/// Preferential membership of `p` toward `community`:
///
/// ```text
/// PM(p, c) = Σ_{q ∈ Γ(p) ∩ c}  Σ_{x ∈ Γ(q), x ≠ p} |Γ(p) ∩ Γ(x)|  /  (|Γ(p)| · |Γ(q)|)
/// ```
///
/// An isolated `p` scores zero.
pub fn preferential_membership(g: &Graph, p: NodeId, community: &[NodeId]) -> Result<BigRational> {
    g.degree(p)?;
    if community.contains(&p) {
        return Err(Error::AlreadyMember(g.label(p).to_owned()));
    }
    Ok(membership_score(g, p, |q| community.contains(&q)))
}

fn membership_score(g: &Graph, p: NodeId, in_community: impl Fn(NodeId) -> bool) -> BigRational {
    let dp = g.deg(p);
    let mut total = BigRational::zero();
    if dp == 0 {
        return total;
    }
    for &q in g.adj(p).iter().filter(|&&q| in_community(q)) {
        let numer = membership_term_numerator(g, p, q);
        let denom = dp * g.deg(q);
        total += BigRational::new(BigInt::from(numer), BigInt::from(denom));
    }
    total
}

/// Labels unassigned nodes by preferential membership.
///
/// Each round scores every unassigned node that has a labelled neighbor
/// against the communities of those neighbors, using the partition as it
/// stood at the start of the round, and moves it to the best one (smallest
/// index on ties). Rounds stop when nothing moves or the round cap is hit;
/// whatever is still unassigned becomes a singleton.
pub fn assign_unlabeled(g: &Graph, partition: &Partition, cfg: &RunConfig) -> Partition {
    let mut part = partition.clone();
    let max_rounds = cfg.max_pm_rounds.unwrap_or(g.node_count()).max(1);

    for _ in 0..max_rounds {
        if part.unassigned().is_empty() {
            break;
        }
        let mut moves = Vec::new();
        for &u in part.unassigned() {
            let targets: BTreeSet<usize> = g
                .adj(u)
                .iter()
                .filter_map(|&v| part.community_of(v))
                .collect();
            let mut best: Option<(usize, BigRational)> = None;
            for c in targets {
                let score = membership_score(g, u, |q| part.community_of(q) == Some(c));
                // ascending index order, so only a strictly larger score wins
                if best.as_ref().is_none_or(|(_, s)| score > *s) {
                    best = Some((c, score));
                }
            }
            if let Some((c, _)) = best {
                moves.push((u, c));
            }
        }
        if moves.is_empty() {
            break;
        }
        for (u, c) in moves {
            part.assign(u, c);
        }
    }

    let rest: Vec<NodeId> = part.unassigned().iter().copied().collect();
    for v in rest {
        part.add_singleton(v);
    }
    part
}

/// Full DCC run.
pub fn dcc(g: &Graph, cfg: &RunConfig) -> Partition {
    let mut cache = NsCache::precompute(g);
    dcc_with_cache(g, cfg, &mut cache)
}

pub fn dcc_with_cache(g: &Graph, cfg: &RunConfig, cache: &mut NsCache) -> Partition {
    let n = g.node_count();
    let (cascades, _) = generate_cascades_with(g, cfg, cache);
    let labelled: Vec<Vec<NodeId>> = cascades.iter().map(Cascade::nodes).collect();
    let seeded = Partition::from_communities(n, merge_overlapping(&labelled))
        .expect("merged communities are disjoint");
    let filled = assign_unlabeled(g, &seeded, cfg);
    let mut out = Partition::from_communities(n, merge_overlapping(filled.communities()))
        .expect("merged communities are disjoint");
    out.canonicalize();
    out
}

/// One DCC run per seed, in parallel when the `parallel` feature is on.
pub fn dcc_seeds(g: &Graph, base: &RunConfig, seeds: &[u64]) -> Vec<Partition> {
    let cache = NsCache::precompute(g);
    crate::parallel::map_collect(seeds, |&seed| {
        dcc_with_cache(g, &RunConfig { seed, ..*base }, &mut cache.clone())
    })
}

pub fn dcc_seeds_sequential(g: &Graph, base: &RunConfig, seeds: &[u64]) -> Vec<Partition> {
    let cache = NsCache::precompute_sequential(g);
    crate::parallel::map_collect_sequential(seeds, |&seed| {
        dcc_with_cache(g, &RunConfig { seed, ..*base }, &mut cache.clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;
    use crate::tie_strength::ns_uncached;

    fn two_k4s(bridge: bool) -> Graph {
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        edges.extend([(4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]);
        if bridge {
            edges.push((3, 4));
        }
        Graph::from_edges(8, &edges)
    }

    /// The neighborhood used in the worked membership example: node 10 with
    /// six neighbors, two of which (8, 9) sit outside the listed lists.
    fn membership_example() -> Graph {
        let text = "10 11\n10 13\n10 14\n10 15\n10 8\n10 9\n\
                    11 12\n11 13\n11 15\n12 13\n12 14\n13 14\n13 15\n14 2\n14 15\n";
        load_edge_list(text).unwrap().0
    }

    fn id(g: &Graph, label: &str) -> NodeId {
        g.node_id(label).unwrap()
    }

    #[test]
    fn edgeless_graph_has_no_cascades() {
        let g = Graph::from_edges(3, &[]);
        let (cascades, rest) = generate_cascades(&g, &RunConfig::default());
        assert!(cascades.is_empty());
        assert_eq!(rest.len(), 3);
        let p = dcc(&g, &RunConfig::default());
        assert_eq!(p.community_count(), 3);
        assert!(p.is_cover());
    }

    #[test]
    fn cascades_stay_inside_bridged_k4s() {
        let g = two_k4s(true);
        for seed in 0..50 {
            let (cascades, _) = generate_cascades(&g, &RunConfig::with_seed(seed));
            for c in &cascades {
                let nodes = c.nodes();
                let side = nodes[0].0 < 4;
                assert!(
                    nodes.iter().all(|v| (v.0 < 4) == side),
                    "seed {seed}: {nodes:?}"
                );
            }
        }
    }

    #[test]
    fn two_separate_k4s_give_two_communities() {
        let g = two_k4s(false);
        for seed in 0..20 {
            let p = dcc(&g, &RunConfig::with_seed(seed));
            let expected = vec![
                (0..4).map(NodeId).collect::<Vec<_>>(),
                (4..8).map(NodeId).collect(),
            ];
            assert_eq!(p.communities(), expected.as_slice(), "seed {seed}");
        }
    }

    #[test]
    fn cascade_steps_link_up() {
        let g = two_k4s(true);
        let (cascades, _) = generate_cascades(&g, &RunConfig::with_seed(3));
        for c in &cascades {
            for (i, s) in c.steps.iter().enumerate() {
                assert_eq!(s.time, i);
                assert_eq!(s.next, c.steps.get(i + 1).map(|n| n.node));
            }
            for w in c.steps.windows(2) {
                assert!(g.has_edge(w[0].node, w[1].node));
            }
        }
    }

    #[test]
    fn membership_worked_example() {
        let g = membership_example();
        let ten = id(&g, "10");
        assert_eq!(g.deg(ten), 6);
        // only 13 is both a neighbor of 10 and in the community:
        // (3 + 2 + 2 + 3) / (6 * 5)
        let community = [id(&g, "12"), id(&g, "13")];
        let pm = preferential_membership(&g, ten, &community).unwrap();
        assert_eq!(pm, BigRational::new(10.into(), 30.into()));
        assert!((num_traits::ToPrimitive::to_f64(&pm).unwrap() - 0.333).abs() < 5e-4);
    }

    #[test]
    fn membership_edge_cases() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (3, 0)]);
        // pendant 3 hangs off 0, which is outside {1, 2}
        let pm = preferential_membership(&g, NodeId(3), &[NodeId(1), NodeId(2)]).unwrap();
        assert!(pm.is_zero());
        assert!(matches!(
            preferential_membership(&g, NodeId(1), &[NodeId(1)]),
            Err(Error::AlreadyMember(_))
        ));
        let isolated = Graph::from_edges(2, &[]);
        assert!(preferential_membership(&isolated, NodeId(0), &[NodeId(1)])
            .unwrap()
            .is_zero());
    }

    #[test]
    fn worked_example_node_joins_the_cascade() {
        let g = membership_example();
        let c1 = vec![id(&g, "13"), id(&g, "12"), id(&g, "11")];
        let start = Partition::from_communities(g.node_count(), vec![c1]).unwrap();
        let out = assign_unlabeled(&g, &start, &RunConfig::default());
        assert_eq!(out.community_of(id(&g, "10")), Some(0));
        assert!(out.check_invariants() && out.is_cover());
    }

    #[test]
    fn assign_is_identity_without_unassigned() {
        let g = two_k4s(true);
        let p = Partition::from_labels(&[0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(assign_unlabeled(&g, &p, &RunConfig::default()), p);
    }

    #[test]
    fn isolated_node_becomes_singleton() {
        let g = Graph::from_edges(3, &[(0, 1)]);
        let start = Partition::from_communities(3, vec![vec![NodeId(0), NodeId(1)]]).unwrap();
        let out = assign_unlabeled(&g, &start, &RunConfig::default());
        assert_eq!(out.communities()[1], vec![NodeId(2)]);
    }

    #[test]
    fn synchronous_rounds_use_round_start_state() {
        // path 0-1-2-3 with only {0} labelled: 1 joins in round one, 2 in round two
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let start = Partition::from_communities(4, vec![vec![NodeId(0)]]).unwrap();
        let one_round = RunConfig {
            max_pm_rounds: Some(1),
            ..RunConfig::default()
        };
        let out = assign_unlabeled(&g, &start, &one_round);
        assert_eq!(
            out.communities(),
            &[vec![NodeId(0), NodeId(1)], vec![NodeId(2)], vec![NodeId(3)]]
        );
        let out = assign_unlabeled(&g, &start, &RunConfig::default());
        assert_eq!(out.community_count(), 1);
    }

    #[test]
    fn revisiting_walks_overlap_then_merge() {
        let (g, _) = crate::datasets::builtin_karate();
        let cfg = RunConfig {
            revisit_processed: true,
            ..RunConfig::default()
        };
        let (cascades, rest) = generate_cascades(&g, &cfg);
        let mut seen = vec![0usize; g.node_count()];
        for c in &cascades {
            let nodes = c.nodes();
            let unique: BTreeSet<_> = nodes.iter().collect();
            assert_eq!(unique.len(), nodes.len());
            for v in nodes {
                seen[v.index()] += 1;
            }
        }
        assert!(seen.iter().any(|&k| k > 1), "expected overlapping cascades");
        assert!(rest.iter().all(|v| seen[v.index()] == 0));
        let p = dcc(&g, &cfg);
        assert!(p.check_invariants() && p.is_cover());
    }

    #[test]
    fn empty_graph() {
        let g = Graph::from_edges(0, &[]);
        let p = dcc(&g, &RunConfig::default());
        assert_eq!(p.community_count(), 0);
        assert_eq!(p.node_count(), 0);
    }

    #[test]
    fn gate_off_allows_zero_strength_hops() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let gated = generate_cascades(&g, &RunConfig::default()).0;
        assert!(gated.is_empty());
        let open = RunConfig {
            require_positive_ns: false,
            ..RunConfig::default()
        };
        let (cascades, _) = generate_cascades(&g, &open);
        assert!(!cascades.is_empty());
        for c in &cascades {
            for w in c.steps.windows(2) {
                assert!(ns_uncached(&g, w[0].node, w[1].node).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn seed_sweep_matches_individual_runs() {
        let g = two_k4s(true);
        let seeds: Vec<u64> = (0..8).collect();
        let par = dcc_seeds(&g, &RunConfig::default(), &seeds);
        let seq = dcc_seeds_sequential(&g, &RunConfig::default(), &seeds);
        assert_eq!(par, seq);
        for (seed, p) in seeds.iter().zip(&par) {
            assert_eq!(*p, dcc(&g, &RunConfig::with_seed(*seed)));
        }
    }
}
