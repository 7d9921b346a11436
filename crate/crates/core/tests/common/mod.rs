//! Brute-force reference implementations shared by the integration and
//! acceptance suites. They work on bitmask adjacency and enumerate every term
//! directly, sharing no code with the library's computations.

#![allow(dead_code)]

use std::collections::BTreeMap;

use dcc_core::{Graph, NodeId};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small graph as neighbor bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Small {
    pub n: usize,
    pub adj: Vec<u64>,
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

fn pop(mask: u64) -> u64 {
    mask.count_ones() as u64
}

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

impl Small {
    pub fn from_mask(n: usize, mask: u64) -> Small {
        let mut adj = vec![0u64; n];
        for (k, (i, j)) in pairs(n).into_iter().enumerate() {
            if mask >> k & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
        Small { n, adj }
    }

    pub fn from_graph(g: &Graph) -> Small {
        assert!(g.node_count() <= 64);
        let mut adj = vec![0u64; g.node_count()];
        for (u, v) in g.edges() {
            adj[u.index()] |= 1 << v.index();
            adj[v.index()] |= 1 << u.index();
        }
        Small {
            n: g.node_count(),
            adj,
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        pairs(self.n)
            .into_iter()
            .filter(|&(i, j)| self.adj[i] >> j & 1 == 1)
            .collect()
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.n, &self.edges())
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    pub fn deg(&self, v: usize) -> u64 {
        pop(self.adj[v])
    }

    pub fn m(&self) -> u64 {
        (0..self.n).map(|v| self.deg(v)).sum::<u64>() / 2
    }

    pub fn connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        pop(seen) as usize == self.n
    }
}

pub fn all_graphs(n: usize) -> impl Iterator<Item = Small> {
    let k = n * n.saturating_sub(1) / 2;
    (0..1u64 << k).map(move |mask| Small::from_mask(n, mask))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// One representative per isomorphism class of graphs on `n` nodes.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Small> {
    let perms = permutations(n);
    let pair_list = pairs(n);
    let mut index = vec![vec![0usize; n]; n];
    for (k, &(i, j)) in pair_list.iter().enumerate() {
        index[i][j] = k;
        index[j][i] = k;
    }
    let k = pair_list.len();
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for mask in 0..1u64 << k {
        let canon = perms
            .iter()
            .map(|perm| {
                let mut out = 0u64;
                for (e, &(i, j)) in pair_list.iter().enumerate() {
                    if mask >> e & 1 == 1 {
                        out |= 1 << index[perm[i]][perm[j]];
                    }
                }
                out
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            reps.push(Small::from_mask(n, mask));
        }
    }
    reps
}

/// Restricted growth strings: every partition of `0..n` into at most
/// `max_blocks` blocks.
pub fn set_partitions(n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    fn go(labels: &mut Vec<usize>, n: usize, max_blocks: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == n {
            out.push(labels.clone());
            return;
        }
        let used = labels.iter().max().map_or(0, |m| m + 1);
        for l in 0..=used.min(max_blocks - 1) {
            labels.push(l);
            go(labels, n, max_blocks, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, max_blocks, &mut out);
    out
}

pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Random graph whose edges cluster inside `blocks` planted groups.
pub fn planted_graph(n: usize, blocks: usize, p_in: f64, p_out: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if i % blocks == j % blocks {
                p_in
            } else {
                p_out
            };
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

// --- tie strength -------------------------------------------------------

pub fn rho(s: &Small, p: usize, q: usize) -> u64 {
    let (gp, gq) = (s.adj[p], s.adj[q]);
    let common = gp & gq;
    let mut total = pop(common);
    for z in bits(common) {
        total += pop(gp & s.adj[z]);
        total += pop(gq & s.adj[z]);
    }
    let mut sigma = 0;
    let mut pair_overlap = 0;
    for w in bits(common) {
        for z in bits(common) {
            if w < z && s.has(w, z) {
                sigma += 1;
                pair_overlap += pop(s.adj[w] & s.adj[z]);
            }
        }
    }
    total + sigma + pair_overlap
}

pub fn chi(s: &Small, p: usize, q: usize) -> u64 {
    pop((s.adj[p] | s.adj[q]) & !(1 << p) & !(1 << q))
}

pub fn ns(s: &Small, p: usize, q: usize) -> Ratio<u64> {
    if s.deg(p) == 1 || s.deg(q) == 1 {
        return Ratio::zero();
    }
    let c = chi(s, p, q);
    if c == 0 {
        Ratio::zero()
    } else {
        Ratio::new(rho(s, p, q), c)
    }
}

// --- preferential membership ---------------------------------------------

pub fn pm(s: &Small, p: usize, community: u64) -> BigRational {
    let dp = s.deg(p);
    let mut total = BigRational::zero();
    if dp == 0 {
        return total;
    }
    for q in 0..s.n {
        if !s.has(p, q) || community >> q & 1 == 0 {
            continue;
        }
        let mut numer = 0u64;
        for x in 0..s.n {
            if x != p && s.has(q, x) {
                numer += (0..s.n).filter(|&y| s.has(p, y) && s.has(x, y)).count() as u64;
            }
        }
        total += BigRational::new(BigInt::from(numer), BigInt::from(dp * s.deg(q)));
    }
    total
}

// --- quality metrics -----------------------------------------------------

fn blocks(labels: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        out.entry(l).or_default().push(i);
    }
    out
}

fn a(s: &Small, i: usize, j: usize) -> f64 {
    if s.has(i, j) {
        1.0
    } else {
        0.0
    }
}

pub fn ngm(s: &Small, labels: &[usize]) -> f64 {
    let two_m = 2.0 * s.m() as f64;
    let mut q = 0.0;
    for i in 0..s.n {
        for j in 0..s.n {
            if labels[i] == labels[j] {
                q += a(s, i, j) - s.deg(i) as f64 * s.deg(j) as f64 / two_m;
            }
        }
    }
    q / two_m
}

fn in_out(s: &Small, members: &[usize], labels: &[usize]) -> (f64, f64) {
    let (mut inside, mut outside) = (0.0, 0.0);
    for &i in members {
        for j in 0..s.n {
            if labels[j] == labels[i] {
                inside += a(s, i, j);
            } else {
                outside += a(s, i, j);
            }
        }
    }
    (inside, outside)
}

pub fn modularity_density(s: &Small, labels: &[usize]) -> f64 {
    blocks(labels)
        .values()
        .map(|members| {
            let (inside, outside) = in_out(s, members, labels);
            (inside - outside) / members.len() as f64
        })
        .sum()
}

pub fn z_modularity(s: &Small, labels: &[usize]) -> Option<f64> {
    let m = s.m() as f64;
    let mut internal = 0.0;
    let mut expected = 0.0;
    for members in blocks(labels).values() {
        let (inside, _) = in_out(s, members, labels);
        internal += inside / 2.0 / m;
        let d: f64 = members.iter().map(|&i| s.deg(i) as f64).sum();
        expected += (d / (2.0 * m)).powi(2);
    }
    let var = expected * (1.0 - expected);
    (var > 0.0).then(|| (internal - expected) / var.sqrt())
}

pub fn cut_ratio(s: &Small, labels: &[usize]) -> f64 {
    let groups = blocks(labels);
    let total: f64 = groups
        .values()
        .map(|members| {
            let mut cut = 0.0;
            let mut possible = 0.0;
            for &i in members {
                for j in 0..s.n {
                    if labels[j] != labels[i] {
                        possible += 1.0;
                        cut += a(s, i, j);
                    }
                }
            }
            if possible == 0.0 {
                0.0
            } else {
                cut / possible
            }
        })
        .sum();
    total / groups.len() as f64
}

// --- agreement metrics ---------------------------------------------------

pub fn nmi(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len() as f64;
    let kx = blocks(x).len();
    let ky = blocks(y).len();
    if kx == 1 && ky == 1 {
        return 1.0;
    }
    if kx == 1 || ky == 1 {
        return 0.0;
    }
    let count = |f: &dyn Fn(usize) -> bool| (0..x.len()).filter(|&i| f(i)).count() as f64;
    let mut hx = 0.0;
    for &lx in blocks(x).keys() {
        let p = count(&|i| x[i] == lx) / n;
        hx -= p * p.ln();
    }
    let mut hy = 0.0;
    for &ly in blocks(y).keys() {
        let p = count(&|i| y[i] == ly) / n;
        hy -= p * p.ln();
    }
    let mut mi = 0.0;
    for &lx in blocks(x).keys() {
        for &ly in blocks(y).keys() {
            let joint = count(&|i| x[i] == lx && y[i] == ly) / n;
            if joint > 0.0 {
                let px = count(&|i| x[i] == lx) / n;
                let py = count(&|i| y[i] == ly) / n;
                mi += joint * (joint / (px * py)).ln();
            }
        }
    }
    2.0 * mi / (hx + hy)
}

/// Pair-counting form: `2(ad − bc) / ((a+b)(b+d) + (a+c)(c+d))`.
pub fn ari(x: &[usize], y: &[usize]) -> f64 {
    let (mut a, mut b, mut c, mut d) = (0i128, 0i128, 0i128, 0i128);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            match (x[i] == x[j], y[i] == y[j]) {
                (true, true) => a += 1,
                (true, false) => b += 1,
                (false, true) => c += 1,
                (false, false) => d += 1,
            }
        }
    }
    let denom = (a + b) * (b + d) + (a + c) * (c + d);
    if denom == 0 {
        return 1.0;
    }
    let r = Ratio::new(2 * (a * d - b * c), denom);
    *r.numer() as f64 / *r.denom() as f64
}

pub fn node(i: usize) -> NodeId {
    NodeId(i as u32)
}
