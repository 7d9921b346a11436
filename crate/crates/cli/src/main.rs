//! `dcc` command-line front end.
//!
//! Exit codes: 0 ok, 1 partial failure (bench), 2 usage or input error,
//! 3 node-set mismatch between a graph and a partition.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use dcc_core::bench::{run_bench, Algorithm, DatasetManifest};
use dcc_core::metrics::{evaluate, EvalReport, Metric, CSV_HEADER};
use dcc_core::{
    builtin_karate, dcc, load_edge_list, load_labels, Error, Graph, Partition, RunConfig,
};

const BUILTIN_KARATE: &str = "builtin:karate";

#[derive(Parser)]
#[command(
    name = "dcc",
    version,
    about = "Cascade-based community detection toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities and write the partition.
    Detect {
        /// Edge-list file, or `builtin:karate`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// `dcc` or `lpa`.
        #[arg(long, default_value = "dcc")]
        algorithm: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PartitionFormat::Json)]
        format: PartitionFormat,
        /// DCC only: let cascades pass through already activated nodes.
        #[arg(long)]
        revisit_processed: bool,
    },
    /// Score a partition (read from a file or computed on the fly).
    Eval {
        #[arg(long)]
        input: PathBuf,
        /// Partition in TSV or JSON form.
        #[arg(long, conflicts_with = "algorithm")]
        partition: Option<PathBuf>,
        /// Compute the partition with `dcc` or `lpa` instead of reading it.
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ground-truth label file; enables NMI and ARI.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        /// Comma-separated metric names; all applicable metrics by default.
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<Metric>,
        /// Dataset name in the report; defaults to the input file stem.
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        /// DCC only: let cascades pass through already activated nodes.
        #[arg(long)]
        revisit_processed: bool,
    },
    /// Run every (dataset, algorithm, seed) triple of a manifest.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        /// Comma-separated algorithm names.
        #[arg(long, value_delimiter = ',', default_value = "dcc,lpa")]
        algorithms: Vec<String>,
        /// Comma-separated seeds; `a..b` is an inclusive range.
        #[arg(long, default_value = "0..9")]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate an external partition against a graph and normalize it.
    ImportPartition {
        #[arg(long)]
        input: PathBuf,
        /// Partition in TSV form.
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::NodeSetMismatch(_) | Error::UnknownNode(_)) => 3,
            _ => 2,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Detect {
            input,
            algorithm,
            seed,
            output,
            format,
            revisit_processed,
        } => cmd_detect(input, &algorithm, seed, output, format, revisit_processed),
        Command::Eval {
            input,
            partition,
            algorithm,
            seed,
            ground_truth,
            metrics,
            dataset,
            format,
            revisit_processed,
        } => cmd_eval(EvalArgs {
            input,
            partition,
            algorithm,
            seed,
            ground_truth,
            metrics,
            dataset,
            format,
            revisit_processed,
        }),
        Command::Bench {
            manifest,
            algorithms,
            seeds,
            out,
        } => cmd_bench(&manifest, &algorithms, &seeds, &out),
        Command::ImportPartition {
            input,
            partition,
            output,
        } => cmd_import_partition(&input, &partition, output),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_graph(path: &Path) -> anyhow::Result<Graph> {
    if path.as_os_str() == BUILTIN_KARATE {
        return Ok(builtin_karate().0);
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (graph, warnings) =
        load_edge_list(&text).with_context(|| format!("parsing {}", path.display()))?;
    if warnings.self_loops > 0 {
        eprintln!("warning: dropped {} self-loop(s)", warnings.self_loops);
    }
    Ok(graph)
}

fn builtin_algorithm(name: &str) -> anyhow::Result<Algorithm> {
    match Algorithm::parse(name) {
        Algorithm::Imported(other) => bail!("unknown algorithm `{other}` (expected dcc or lpa)"),
        alg => Ok(alg),
    }
}

fn run_algorithm(alg: &Algorithm, graph: &Graph, seed: u64, revisit_processed: bool) -> Partition {
    match alg {
        Algorithm::Dcc => dcc(
            graph,
            &RunConfig {
                seed,
                revisit_processed,
                ..RunConfig::default()
            },
        ),
        other => other.run(graph, seed).expect("built-in algorithm"),
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_detect(
    input: Option<PathBuf>,
    algorithm: &str,
    seed: u64,
    output: Option<PathBuf>,
    format: PartitionFormat,
    revisit_processed: bool,
) -> CmdResult {
    let alg = builtin_algorithm(algorithm).map_err(Failure::usage)?;
    let input = input.ok_or_else(|| Failure::usage(anyhow!("--input is required")))?;
    let graph = load_graph(&input).map_err(Failure::usage)?;
    let partition = run_algorithm(&alg, &graph, seed, revisit_processed);
    let text = match format {
        PartitionFormat::Tsv => partition.to_tsv(&graph),
        PartitionFormat::Json => partition.to_json(&graph, seed, alg.name()),
    };
    emit(output.as_deref(), &text).map_err(Failure::usage)?;
    Ok(ExitCode::SUCCESS)
}

fn read_partition(graph: &Graph, path: &Path) -> Result<Partition, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::usage)?;
    let parsed = if text.trim_start().starts_with('{') {
        Partition::from_json(graph, &text)
    } else {
        Partition::from_tsv(graph, &text)
    };
    parsed
        .with_context(|| format!("partition {}", path.display()))
        .map_err(Failure::from)
}

struct EvalArgs {
    input: PathBuf,
    partition: Option<PathBuf>,
    algorithm: Option<String>,
    seed: u64,
    ground_truth: Option<PathBuf>,
    metrics: Vec<Metric>,
    dataset: Option<String>,
    format: ReportFormat,
    revisit_processed: bool,
}

fn cmd_eval(args: EvalArgs) -> CmdResult {
    let graph = load_graph(&args.input).map_err(Failure::usage)?;
    let (partition, algorithm) = match (&args.partition, &args.algorithm) {
        (Some(path), _) => (read_partition(&graph, path)?, "imported".to_owned()),
        (None, Some(name)) => {
            let alg = builtin_algorithm(name).map_err(Failure::usage)?;
            let p = run_algorithm(&alg, &graph, args.seed, args.revisit_processed);
            (p, alg.name().to_owned())
        }
        (None, None) => {
            return Err(Failure::usage(anyhow!(
                "one of --partition or --algorithm is required"
            )))
        }
    };
    let truth = match &args.ground_truth {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::usage)?;
            let (labels, _) = load_labels(&text).map_err(Failure::from)?;
            Some(
                Partition::from_ground_truth(&graph, &labels)
                    .context("ground truth")
                    .map_err(Failure::from)?,
            )
        }
        None => None,
    };
    let metrics = if args.metrics.is_empty() {
        Metric::ALL.to_vec()
    } else {
        args.metrics
    };
    let values = evaluate(&graph, &partition, truth.as_ref(), &metrics)?;
    let dataset = args.dataset.unwrap_or_else(|| {
        args.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into())
    });
    let report = EvalReport {
        dataset,
        algorithm,
        seed: args.seed,
        communities: partition.community_count(),
        metrics: values,
    };
    match args.format {
        ReportFormat::Json => {
            let json =
                serde_json::to_string_pretty(&report).map_err(|e| Failure::usage(e.into()))?;
            println!("{json}");
        }
        ReportFormat::Csv => {
            println!("{CSV_HEADER}");
            println!("{}", report.csv_row());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_seeds(list: &str) -> anyhow::Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty seed range `{part}`");
            }
            seeds.extend(a..=b);
        } else {
            seeds.push(part.parse().with_context(|| format!("seed `{part}`"))?);
        }
    }
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}

fn cmd_bench(manifest: &Path, algorithms: &[String], seeds: &str, out: &Path) -> CmdResult {
    let seeds = parse_seeds(seeds).map_err(Failure::usage)?;
    let manifest = DatasetManifest::load(manifest).map_err(|e| Failure::usage(e.into()))?;
    let mut algs: Vec<Algorithm> = algorithms.iter().map(|a| Algorithm::parse(a)).collect();
    algs.sort();
    algs.dedup();
    if algs.is_empty() {
        return Err(Failure::usage(anyhow!("no algorithms given")));
    }
    let result = run_bench(&manifest, &algs, &seeds).map_err(|e| Failure::usage(e.into()))?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    result
        .write_to(out, &stamp.to_string())
        .with_context(|| format!("writing results to {}", out.display()))
        .map_err(Failure::usage)?;
    eprintln!(
        "{} report(s) written to {}",
        result.reports.len(),
        out.display()
    );
    if result.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &result.failures {
            eprintln!(
                "failed: {} {}: {}",
                f.dataset,
                f.algorithm.as_deref().unwrap_or("(load)"),
                f.message
            );
        }
        Ok(ExitCode::from(1))
    }
}

fn cmd_import_partition(input: &Path, partition: &Path, output: Option<PathBuf>) -> CmdResult {
    let graph = load_graph(input).map_err(Failure::usage)?;
    let p = read_partition(&graph, partition)?;
    emit(output.as_deref(), &p.to_tsv(&graph)).map_err(Failure::usage)?;
    eprintln!(
        "{} nodes in {} communities",
        p.node_count(),
        p.community_count()
    );
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0..4").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_seeds("3, 1,1").unwrap(), vec![1, 3]);
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("x").is_err());
    }
}
