//! Manifest-driven benchmark runs.
//!
//! A manifest is a TOML file with one table per dataset:
//!
//! ```toml
//! [karate]
//! edges = "karate.edges"      # required
//! labels = "karate.labels"    # optional ground truth
//!
//! [karate.partitions]         # optional precomputed partitions (TSV)
//! gm = "karate.gm.tsv"
//! ```
//!
//! Relative paths are resolved against the manifest's directory. Algorithms
//! other than `dcc` and `lpa` are looked up in each dataset's `partitions`
//! table, which lets externally produced partitions be scored alongside.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dcc::{dcc, RunConfig};
use crate::error::{Error, Result};
use crate::graph::{load_edge_list, load_labels, Graph};
use crate::lpa::{lpa, LpaConfig};
use crate::metrics::{csv_field, evaluate, format_sig6, EvalReport, Metric, CSV_HEADER};
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetEntry {
    pub name: String,
    pub edges: PathBuf,
    pub labels: Option<PathBuf>,
    pub partitions: BTreeMap<String, PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DatasetManifest {
    pub entries: Vec<DatasetEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    edges: PathBuf,
    labels: Option<PathBuf>,
    #[serde(default)]
    partitions: BTreeMap<String, PathBuf>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses manifest text, resolving paths against `base` and checking that
    /// every referenced file exists. An empty manifest is an error.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw: BTreeMap<String, RawEntry> =
            toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        if raw.is_empty() {
            return Err(Error::Manifest("no datasets listed".into()));
        }
        let resolve = |p: PathBuf| -> Result<PathBuf> {
            let full = if p.is_absolute() { p } else { base.join(p) };
            if full.is_file() {
                Ok(full)
            } else {
                Err(Error::Manifest(format!("missing file {}", full.display())))
            }
        };
        let mut entries = Vec::with_capacity(raw.len());
        for (name, e) in raw {
            entries.push(DatasetEntry {
                edges: resolve(e.edges)?,
                labels: e.labels.map(&resolve).transpose()?,
                partitions: e
                    .partitions
                    .into_iter()
                    .map(|(alg, p)| Ok((alg.to_ascii_lowercase(), resolve(p)?)))
                    .collect::<Result<_>>()?,
                name,
            });
        }
        Ok(DatasetManifest { entries })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Algorithm {
    Dcc,
    Lpa,
    /// A partition read from the dataset's `partitions` table.
    Imported(String),
}

impl Algorithm {
    pub fn parse(name: &str) -> Self {
        match name.trim().to_ascii_lowercase().as_str() {
            "dcc" => Algorithm::Dcc,
            "lpa" => Algorithm::Lpa,
            other => Algorithm::Imported(other.to_owned()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Algorithm::Dcc => "dcc",
            Algorithm::Lpa => "lpa",
            Algorithm::Imported(n) => n,
        }
    }

    pub fn run(&self, g: &Graph, seed: u64) -> Option<Partition> {
        match self {
            Algorithm::Dcc => Some(dcc(g, &RunConfig::with_seed(seed))),
            Algorithm::Lpa => Some(lpa(g, &LpaConfig::with_seed(seed))),
            Algorithm::Imported(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchFailure {
    pub dataset: String,
    pub algorithm: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub reports: Vec<EvalReport>,
    pub failures: Vec<BenchFailure>,
    pub toolkit_version: String,
    pub decisions_version: String,
}

struct LoadedDataset {
    name: String,
    graph: Graph,
    truth: Option<Partition>,
    imported: BTreeMap<String, Result<Partition>>,
}

fn load_dataset(entry: &DatasetEntry) -> Result<LoadedDataset> {
    let (graph, _) = load_edge_list(&fs::read_to_string(&entry.edges)?)?;
    let truth = match &entry.labels {
        Some(path) => {
            let (t, _) = load_labels(&fs::read_to_string(path)?)?;
            Some(Partition::from_ground_truth(&graph, &t)?)
        }
        None => None,
    };
    let imported = entry
        .partitions
        .iter()
        .map(|(alg, path)| {
            let p = fs::read_to_string(path)
                .map_err(Error::from)
                .and_then(|text| Partition::from_tsv(&graph, &text));
            (alg.clone(), p)
        })
        .collect();
    Ok(LoadedDataset {
        name: entry.name.clone(),
        graph,
        truth,
        imported,
    })
}

/// Runs every (dataset, algorithm, seed) triple. Triples are evaluated in
/// parallel when the `parallel` feature is on; reports are sorted by
/// dataset, algorithm name and seed either way.
pub fn run_bench(
    manifest: &DatasetManifest,
    algorithms: &[Algorithm],
    seeds: &[u64],
) -> Result<BenchResult> {
    run_bench_with(manifest, algorithms, seeds, true)
}

pub fn run_bench_sequential(
    manifest: &DatasetManifest,
    algorithms: &[Algorithm],
    seeds: &[u64],
) -> Result<BenchResult> {
    run_bench_with(manifest, algorithms, seeds, false)
}

fn run_bench_with(
    manifest: &DatasetManifest,
    algorithms: &[Algorithm],
    seeds: &[u64],
    parallel: bool,
) -> Result<BenchResult> {
    if manifest.entries.is_empty() {
        return Err(Error::Manifest("no datasets listed".into()));
    }
    for alg in algorithms {
        if let Algorithm::Imported(name) = alg {
            if !manifest
                .entries
                .iter()
                .any(|e| e.partitions.contains_key(name))
            {
                return Err(Error::Manifest(format!("unknown algorithm `{name}`")));
            }
        }
    }

    let mut failures = Vec::new();
    let mut datasets = Vec::new();
    for entry in &manifest.entries {
        match load_dataset(entry) {
            Ok(d) => datasets.push(d),
            Err(e) => failures.push(BenchFailure {
                dataset: entry.name.clone(),
                algorithm: None,
                message: e.to_string(),
            }),
        }
    }

    let mut triples = Vec::new();
    for d in &datasets {
        for alg in algorithms {
            for &seed in seeds {
                triples.push((d, alg, seed));
            }
        }
    }
    let evaluate_one = |&(d, alg, seed): &(&LoadedDataset, &Algorithm, u64)| {
        let fail = |message: String| BenchFailure {
            dataset: d.name.clone(),
            algorithm: Some(alg.name().to_owned()),
            message,
        };
        let partition = match alg.run(&d.graph, seed) {
            Some(p) => p,
            None => match d.imported.get(alg.name()) {
                Some(Ok(p)) => p.clone(),
                Some(Err(e)) => return Err(fail(e.to_string())),
                None => return Err(fail("no partition file for this dataset".into())),
            },
        };
        let metrics = evaluate(&d.graph, &partition, d.truth.as_ref(), &Metric::ALL)
            .map_err(|e| fail(e.to_string()))?;
        Ok(EvalReport {
            dataset: d.name.clone(),
            algorithm: alg.name().to_owned(),
            seed,
            communities: partition.community_count(),
            metrics,
        })
    };
    let outcomes = if parallel {
        crate::parallel::map_collect(&triples, evaluate_one)
    } else {
        crate::parallel::map_collect_sequential(&triples, evaluate_one)
    };

    let mut reports = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => reports.push(r),
            Err(f) => {
                if !failures.contains(&f) {
                    failures.push(f);
                }
            }
        }
    }
    reports.sort_by(|a, b| {
        (&a.dataset, &a.algorithm, a.seed).cmp(&(&b.dataset, &b.algorithm, b.seed))
    });
    failures.sort_by(|a, b| (&a.dataset, &a.algorithm).cmp(&(&b.dataset, &b.algorithm)));

    Ok(BenchResult {
        reports,
        failures,
        toolkit_version: env!("CARGO_PKG_VERSION").to_owned(),
        decisions_version: crate::DECISIONS_VERSION.to_owned(),
    })
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

impl BenchResult {
    /// `results.csv` body: header plus one row per report, no timestamp.
    pub fn results_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.reports {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    fn datasets(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.reports.iter().map(|r| r.dataset.as_str()).collect();
        names.dedup();
        names
    }

    fn algorithms(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.reports.iter().map(|r| r.algorithm.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    /// Median of `metric` over seeds for one (dataset, algorithm) pair.
    pub fn median_of(&self, dataset: &str, algorithm: &str, metric: Metric) -> Option<f64> {
        let mut values: Vec<f64> = self
            .reports
            .iter()
            .filter(|r| r.dataset == dataset && r.algorithm == algorithm)
            .filter_map(|r| r.metrics.get(metric))
            .collect();
        median(&mut values)
    }

    /// Datasets as rows, algorithms as columns, per-seed medians as cells.
    pub fn pivot_csv(&self, metric: Metric) -> String {
        let algorithms = self.algorithms();
        let mut out = String::from("dataset");
        for a in &algorithms {
            out.push(',');
            out.push_str(&csv_field(a));
        }
        out.push('\n');
        for d in self.datasets() {
            out.push_str(&csv_field(d));
            for a in &algorithms {
                out.push(',');
                if let Some(v) = self.median_of(d, a, metric) {
                    out.push_str(&format_sig6(v));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes `results.csv`, `results.json` and one `pivot_<metric>.csv` per
    /// metric into `dir`. The first line of `results.csv` is a comment
    /// carrying `generated_at`; everything after it depends only on inputs.
    pub fn write_to(&self, dir: &Path, generated_at: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut csv = String::new();
        let _ = writeln!(
            csv,
            "# generated_at={generated_at} toolkit={} decisions={}",
            self.toolkit_version, self.decisions_version
        );
        csv.push_str(&self.results_csv());
        fs::write(dir.join("results.csv"), csv)?;

        #[derive(Serialize)]
        struct Document<'a> {
            generated_at: &'a str,
            #[serde(flatten)]
            result: &'a BenchResult,
        }
        let mut json = serde_json::to_string_pretty(&Document {
            generated_at,
            result: self,
        })?;
        json.push('\n');
        fs::write(dir.join("results.json"), json)?;

        for m in Metric::ALL {
            fs::write(
                dir.join(format!("pivot_{}.csv", m.name())),
                self.pivot_csv(m),
            )?;
        }
        Ok(())
    }
}
