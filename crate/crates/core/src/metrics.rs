//! Partition quality and agreement metrics.
//!
//! With `m` edges, and for each community `c` its internal edge count `e_c`,
//! degree sum `d_c`, cut size `cut_c` (edges leaving `c`) and `a_c = d_c / 2m`:
//!
//! | metric | formula |
//! |---|---|
//! | NGM | `Σ_c (e_c / m − a_c²)` |
//! | Modularity density | `Σ_c (2·e_c − cut_c) / |c|` |
//! | Z-modularity | `(Σ_c e_c/m − Σ_c a_c²) / sqrt(Σ_c a_c² · (1 − Σ_c a_c²))` |
//! | Cut ratio | `mean_c cut_c / (|c| · (n − |c|))`, a whole-graph community counting 0 |
//! | NMI | `2·I(X;Y) / (H(X) + H(Y))` |
//! | ARI | Hubert–Arabie adjusted Rand index |
//!
//! NMI is 1 when both partitions are a single cluster and 0 when exactly one
//! of them is. ARI is 1 when its chance-corrected denominator vanishes, which
//! only happens for identical partitions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Ngm,
    ModularityDensity,
    ZModularity,
    CutRatio,
    Nmi,
    Ari,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Ngm,
        Metric::ModularityDensity,
        Metric::ZModularity,
        Metric::CutRatio,
        Metric::Nmi,
        Metric::Ari,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ngm => "ngm",
            Metric::ModularityDensity => "md",
            Metric::ZModularity => "zm",
            Metric::CutRatio => "cut_ratio",
            Metric::Nmi => "nmi",
            Metric::Ari => "ari",
        }
    }

    pub fn needs_ground_truth(self) -> bool {
        matches!(self, Metric::Nmi | Metric::Ari)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

struct CommunityStats {
    size: usize,
    internal_edges: usize,
    degree_sum: usize,
    cut: usize,
}

fn labels_for(g: &Graph, p: &Partition) -> Result<Vec<usize>> {
    if p.node_count() != g.node_count() {
        return Err(Error::NodeSetMismatch(format!(
            "partition has {} nodes, graph has {}",
            p.node_count(),
            g.node_count()
        )));
    }
    p.labels().ok_or_else(|| {
        Error::NodeSetMismatch(format!("{} node(s) unassigned", p.unassigned().len()))
    })
}

fn community_stats(g: &Graph, p: &Partition) -> Result<Vec<CommunityStats>> {
    let labels = labels_for(g, p)?;
    let mut stats: Vec<CommunityStats> = p
        .communities()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.is_empty() {
                Err(Error::EmptyCommunity(i))
            } else {
                Ok(CommunityStats {
                    size: c.len(),
                    internal_edges: 0,
                    degree_sum: 0,
                    cut: 0,
                })
            }
        })
        .collect::<Result<_>>()?;
    for v in g.nodes() {
        stats[labels[v.index()]].degree_sum += g.deg(v);
    }
    for (u, v) in g.edges() {
        let (cu, cv) = (labels[u.index()], labels[v.index()]);
        if cu == cv {
            stats[cu].internal_edges += 1;
        } else {
            stats[cu].cut += 1;
            stats[cv].cut += 1;
        }
    }
    Ok(stats)
}

/// Newman–Girvan modularity.
pub fn ngm(g: &Graph, p: &Partition) -> Result<f64> {
    let stats = community_stats(g, p)?;
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::UndefinedMetric("ngm"));
    }
    let (internal, expected) = fractions(&stats, m);
    Ok(internal - expected)
}

/// `(Σ e_c / m, Σ a_c²)`.
fn fractions(stats: &[CommunityStats], m: usize) -> (f64, f64) {
    let m = m as f64;
    stats.iter().fold((0.0, 0.0), |(fi, fe), s| {
        let a = s.degree_sum as f64 / (2.0 * m);
        (fi + s.internal_edges as f64 / m, fe + a * a)
    })
}

pub fn modularity_density(g: &Graph, p: &Partition) -> Result<f64> {
    let stats = community_stats(g, p)?;
    Ok(stats
        .iter()
        .map(|s| (2.0 * s.internal_edges as f64 - s.cut as f64) / s.size as f64)
        .sum())
}

pub fn z_modularity(g: &Graph, p: &Partition) -> Result<f64> {
    let stats = community_stats(g, p)?;
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::UndefinedMetric("zm"));
    }
    let (internal, expected) = fractions(&stats, m);
    let variance = expected * (1.0 - expected);
    if variance <= 0.0 {
        return Err(Error::UndefinedMetric("zm"));
    }
    Ok((internal - expected) / variance.sqrt())
}

pub fn cut_ratio(g: &Graph, p: &Partition) -> Result<f64> {
    let stats = community_stats(g, p)?;
    let n = g.node_count();
    if n < 2 || stats.is_empty() {
        return Err(Error::UndefinedMetric("cut_ratio"));
    }
    let total: f64 = stats
        .iter()
        .map(|s| {
            let pairs = s.size * (n - s.size);
            if pairs == 0 {
                0.0
            } else {
                s.cut as f64 / pairs as f64
            }
        })
        .sum();
    Ok(total / stats.len() as f64)
}

fn paired_labels(p1: &Partition, p2: &Partition) -> Result<(Vec<usize>, Vec<usize>)> {
    if p1.node_count() != p2.node_count() {
        return Err(Error::NodeSetMismatch(format!(
            "partitions cover {} and {} nodes",
            p1.node_count(),
            p2.node_count()
        )));
    }
    match (p1.labels(), p2.labels()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::NodeSetMismatch(
            "both partitions must assign every node".into(),
        )),
    }
}

struct Contingency {
    n: usize,
    cells: BTreeMap<(usize, usize), usize>,
    rows: BTreeMap<usize, usize>,
    cols: BTreeMap<usize, usize>,
}

fn contingency(a: &[usize], b: &[usize]) -> Contingency {
    let mut t = Contingency {
        n: a.len(),
        cells: BTreeMap::new(),
        rows: BTreeMap::new(),
        cols: BTreeMap::new(),
    };
    for (&x, &y) in a.iter().zip(b) {
        *t.cells.entry((x, y)).or_insert(0) += 1;
        *t.rows.entry(x).or_insert(0) += 1;
        *t.cols.entry(y).or_insert(0) += 1;
    }
    t
}

fn entropy(counts: &BTreeMap<usize, usize>, n: f64) -> f64 {
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information, arithmetic-mean normalization.
pub fn nmi(p1: &Partition, p2: &Partition) -> Result<f64> {
    let (a, b) = paired_labels(p1, p2)?;
    if a.is_empty() {
        return Err(Error::UndefinedMetric("nmi"));
    }
    let t = contingency(&a, &b);
    let (single_a, single_b) = (t.rows.len() == 1, t.cols.len() == 1);
    if single_a && single_b {
        return Ok(1.0);
    }
    if single_a || single_b {
        return Ok(0.0);
    }
    let n = t.n as f64;
    let (ha, hb) = (entropy(&t.rows, n), entropy(&t.cols, n));
    let mi: f64 = t
        .cells
        .iter()
        .map(|(&(x, y), &c)| {
            let c = c as f64;
            c / n * (n * c / (t.rows[&x] as f64 * t.cols[&y] as f64)).ln()
        })
        .sum();
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

fn choose2(k: usize) -> f64 {
    (k as f64) * (k as f64 - 1.0) / 2.0
}

/// Adjusted Rand index.
pub fn ari(p1: &Partition, p2: &Partition) -> Result<f64> {
    let (a, b) = paired_labels(p1, p2)?;
    if a.len() < 2 {
        return Err(Error::UndefinedMetric("ari"));
    }
    let t = contingency(&a, &b);
    let index: f64 = t.cells.values().map(|&c| choose2(c)).sum();
    let sum_a: f64 = t.rows.values().map(|&c| choose2(c)).sum();
    let sum_b: f64 = t.cols.values().map(|&c| choose2(c)).sum();
    let expected = sum_a * sum_b / choose2(t.n);
    let max_index = (sum_a + sum_b) / 2.0;
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

/// Metric values for one partition; `None` when not requested or undefined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub ngm: Option<f64>,
    pub md: Option<f64>,
    pub zm: Option<f64>,
    pub cut_ratio: Option<f64>,
    pub nmi: Option<f64>,
    pub ari: Option<f64>,
}

impl MetricValues {
    pub fn get(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::Ngm => self.ngm,
            Metric::ModularityDensity => self.md,
            Metric::ZModularity => self.zm,
            Metric::CutRatio => self.cut_ratio,
            Metric::Nmi => self.nmi,
            Metric::Ari => self.ari,
        }
    }

    fn slot(&mut self, m: Metric) -> &mut Option<f64> {
        match m {
            Metric::Ngm => &mut self.ngm,
            Metric::ModularityDensity => &mut self.md,
            Metric::ZModularity => &mut self.zm,
            Metric::CutRatio => &mut self.cut_ratio,
            Metric::Nmi => &mut self.nmi,
            Metric::Ari => &mut self.ari,
        }
    }
}

/// Computes `metrics` for `p`. Undefined metrics come back as `None`;
/// accuracy metrics are skipped when `truth` is absent. Node-set mismatches
/// are errors.
pub fn evaluate(
    g: &Graph,
    p: &Partition,
    truth: Option<&Partition>,
    metrics: &[Metric],
) -> Result<MetricValues> {
    labels_for(g, p)?;
    if let Some(t) = truth {
        labels_for(g, t)?;
    }
    let mut out = MetricValues::default();
    for &m in metrics {
        let value = match (m, truth) {
            (Metric::Ngm, _) => ngm(g, p),
            (Metric::ModularityDensity, _) => modularity_density(g, p),
            (Metric::ZModularity, _) => z_modularity(g, p),
            (Metric::CutRatio, _) => cut_ratio(g, p),
            (Metric::Nmi, Some(t)) => nmi(p, t),
            (Metric::Ari, Some(t)) => ari(p, t),
            (Metric::Nmi | Metric::Ari, None) => continue,
        };
        *out.slot(m) = match value {
            Ok(v) => Some(v),
            Err(Error::UndefinedMetric(_)) => None,
            Err(e) => return Err(e),
        };
    }
    Ok(out)
}

/// One evaluated (dataset, algorithm, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub algorithm: String,
    pub seed: u64,
    pub communities: usize,
    pub metrics: MetricValues,
}

pub const CSV_HEADER: &str = "dataset,algorithm,seed,communities,ngm,md,zm,cut_ratio,nmi,ari";

impl EvalReport {
    pub fn csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{},{}",
            csv_field(&self.dataset),
            csv_field(&self.algorithm),
            self.seed,
            self.communities
        );
        for m in Metric::ALL {
            row.push(',');
            if let Some(v) = self.metrics.get(m) {
                row.push_str(&format_sig6(v));
            }
        }
        row
    }

    /// Checks the documented value ranges.
    pub fn in_range(&self) -> bool {
        let m = &self.metrics;
        m.nmi.is_none_or(|v| (0.0..=1.0).contains(&v))
            && m.ari.is_none_or(|v| (-1.0..=1.0 + 1e-12).contains(&v))
            && m.cut_ratio.is_none_or(|v| (0.0..=1.0).contains(&v))
            && m.ngm.is_none_or(|v| (-1.0..1.0).contains(&v))
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Plain decimal with six significant digits.
pub fn format_sig6(x: f64) -> String {
    const SIG: i32 = 6;
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if exp >= SIG - 1 {
        let scale = 10f64.powi(exp - SIG + 1);
        format!("{:.0}", (x / scale).round() * scale)
    } else {
        let decimals = (SIG - 1 - exp) as usize;
        let s = format!("{x:.decimals$}");
        // rounding may carry into a new leading digit
        let carried = s
            .parse::<f64>()
            .is_ok_and(|r| r.abs() >= 10f64.powi(exp + 1));
        if carried && decimals > 0 {
            format!("{x:.prec$}", prec = decimals - 1)
        } else {
            s
        }
    };
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        "0".to_owned()
    } else {
        s
    }
}
