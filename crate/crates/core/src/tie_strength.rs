//! Neighborhood Similarity tie strength.
//!
//! For an edge `(p, q)` with common neighbors `CN = Γ(p) ∩ Γ(q)`:
//!
//! ```text
//! ρ(p,q) = |CN|
//!        + Σ_{z ∈ CN} ( |Γ(p) ∩ Γ(z)| + |Γ(q) ∩ Γ(z)| )
//!        + σ(p,q)                                  edges inside CN
//!        + Σ_{{w,z} ⊆ CN, w~z} |Γ(w) ∩ Γ(z)|
//! χ(p,q) = |(Γ(p) ∪ Γ(q)) \ {p, q}|
//! NS(p,q) = ρ / χ, or 0 when either endpoint has degree 1 or χ = 0
//! ```
//!
//! Values are exact rationals so that the `≤` comparisons driving cascade
//! growth never depend on floating-point rounding.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Exact non-negative tie strength `ρ / χ`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TieStrength(Ratio<u64>);

impl TieStrength {
    pub fn zero() -> Self {
        TieStrength(Ratio::zero())
    }

    /// `rho / chi`; a zero `chi` yields zero.
    pub fn new(rho: u64, chi: u64) -> Self {
        if chi == 0 {
            Self::zero()
        } else {
            TieStrength(Ratio::new(rho, chi))
        }
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for TieStrength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn require_edge(g: &Graph, p: NodeId, q: NodeId) -> Result<()> {
    if g.has_edge(p, q) {
        Ok(())
    } else {
        let name = |v: NodeId| {
            if g.contains(v) {
                g.label(v).to_owned()
            } else {
                v.to_string()
            }
        };
        Err(Error::NotAnEdge(name(p), name(q)))
    }
}

/// ρ(p,q), the common-neighborhood count of an edge.
pub fn common_neighborhood(g: &Graph, p: NodeId, q: NodeId) -> Result<u64> {
    require_edge(g, p, q)?;
    Ok(rho_unchecked(g, p, q))
}

fn rho_unchecked(g: &Graph, p: NodeId, q: NodeId) -> u64 {
    let cn = g.common_neighbors(p, q);
    let mut rho = cn.len();
    for &z in &cn {
        rho += g.common_count(p, z) + g.common_count(q, z);
    }
    for (i, &w) in cn.iter().enumerate() {
        for &z in &cn[i + 1..] {
            if g.has_edge(w, z) {
                // σ contributes one per inner edge
                rho += 1 + g.common_count(w, z);
            }
        }
    }
    rho as u64
}

/// χ(p,q), the number of distinct nodes around the edge other than its
/// endpoints.
pub fn chi(g: &Graph, p: NodeId, q: NodeId) -> Result<u64> {
    require_edge(g, p, q)?;
    Ok(chi_unchecked(g, p, q))
}

fn chi_unchecked(g: &Graph, p: NodeId, q: NodeId) -> u64 {
    // q ∈ Γ(p) and p ∈ Γ(q); the shared nodes are counted once
    (g.deg(p) + g.deg(q) - g.common_count(p, q) - 2) as u64
}

fn ns_unchecked(g: &Graph, p: NodeId, q: NodeId) -> TieStrength {
    if g.deg(p) == 1 || g.deg(q) == 1 {
        return TieStrength::zero();
    }
    TieStrength::new(rho_unchecked(g, p, q), chi_unchecked(g, p, q))
}

#[inline]
fn key(p: NodeId, q: NodeId) -> (NodeId, NodeId) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

/// Memo of tie strengths keyed by unordered node pair.
///
/// A cache is meant for a single graph and a single worker; build one per
/// run, or freeze a [`NsCache::precompute`]d one and share it read-only.
#[derive(Debug, Clone, Default)]
pub struct NsCache {
    memo: HashMap<(NodeId, NodeId), TieStrength>,
}

impl NsCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fills the cache with every edge of `g`, in parallel when the
    /// `parallel` feature is enabled.
    pub fn precompute(g: &Graph) -> Self {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            let memo = (0..g.node_count())
                .into_par_iter()
                .flat_map_iter(|u| {
                    let u = NodeId::from(u);
                    g.adj(u)
                        .iter()
                        .copied()
                        .filter(move |&v| u < v)
                        .map(move |v| ((u, v), ns_unchecked(g, u, v)))
                })
                .collect();
            NsCache { memo }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Self::precompute_sequential(g)
        }
    }

    pub fn precompute_sequential(g: &Graph) -> Self {
        let memo = g
            .edges()
            .map(|(u, v)| ((u, v), ns_unchecked(g, u, v)))
            .collect();
        NsCache { memo }
    }

    pub fn get(&self, p: NodeId, q: NodeId) -> Option<TieStrength> {
        self.memo.get(&key(p, q)).copied()
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }
}

/// NS(p,q) for an edge, memoized in `cache`.
pub fn ns(g: &Graph, p: NodeId, q: NodeId, cache: &mut NsCache) -> Result<TieStrength> {
    if let Some(ts) = cache.get(p, q) {
        return Ok(ts);
    }
    require_edge(g, p, q)?;
    let ts = ns_unchecked(g, p, q);
    cache.memo.insert(key(p, q), ts);
    Ok(ts)
}

/// NS(p,q) without memoization.
pub fn ns_uncached(g: &Graph, p: NodeId, q: NodeId) -> Result<TieStrength> {
    require_edge(g, p, q)?;
    Ok(ns_unchecked(g, p, q))
}

/// The candidate neighbor of `p` with the largest tie strength, smallest id
/// first on ties. `None` when there are no candidates.
pub fn find_maxts(
    g: &Graph,
    p: NodeId,
    candidates: impl IntoIterator<Item = NodeId>,
    cache: &mut NsCache,
) -> Result<Option<(NodeId, TieStrength)>> {
    let mut best: Option<(NodeId, TieStrength)> = None;
    for q in candidates {
        let ts = ns(g, p, q, cache)?;
        best = match best {
            Some((bq, bts)) if bts > ts || (bts == ts && bq < q) => Some((bq, bts)),
            _ => Some((q, ts)),
        };
    }
    Ok(best)
}
