//! `codeood`: build out-of-distribution splits of code datasets and score
//! model predictions on them.
//!
//! Exit codes: 0 success, 1 internal error, 2 input or validation error.

mod analyze;
mod cluster;
mod config;
mod eval;
mod output;
mod split;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use codeood_core::corpus::{Basis, TaskKind};
use codeood_core::elements::ElementKind;
use codeood_core::splitter::Dimension;
use serde_json::Value;

use crate::config::{read_config_file, resolve, Flags};

#[derive(Parser)]
#[command(name = "codeood", version, about = "Out-of-distribution scenarios for source-code datasets")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// text2code, refinement or translation.
    #[arg(long, global = true)]
    task: Option<TaskKind>,
    /// Text field carrying the masked properties (input or target).
    #[arg(long, global = true, value_parser = parse_basis)]
    basis: Option<Basis>,
    #[command(subcommand)]
    command: Command,
}

fn parse_basis(s: &str) -> Result<Basis, String> {
    serde_json::from_value(Value::String(s.into())).map_err(|_| format!("unknown basis {s:?} (expected input or target)"))
}

#[derive(Subcommand)]
enum Command {
    /// Token-size quantiles, element coverage and suggested scenarios.
    Analyze(AnalyzeArgs),
    /// Reduce embeddings with PCA and cluster them with k-means.
    Cluster(ClusterArgs),
    /// Build one scenario (or a preset set) and write the split files.
    Split(SplitArgs),
    /// Score predictions on split scenarios.
    Eval(EvalArgs),
    /// Merge earlier eval reports into one set of tables.
    Report(ReportArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Target train coverage for suggested syntax scenarios.
    #[arg(long)]
    coverage: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Externally computed token sizes, lines of {"id", "token_size"}.
    #[arg(long)]
    token_sizes: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Number of clusters, or "auto" for the elbow search.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// PCA target dimension (0 disables PCA).
    #[arg(long)]
    pca_dim: Option<usize>,
    /// Fit PCA and k-means on "all" embedded samples or "train" only.
    #[arg(long)]
    fit_on: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// k-means++ restarts per fit.
    #[arg(long)]
    n_init: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    dimension: Option<Dimension>,
    /// Complexity percentile range, e.g. 97:100.
    #[arg(long)]
    range: Option<String>,
    /// Comma-separated language elements, e.g. while_statement,>=.
    #[arg(long, value_delimiter = ',')]
    elements: Option<Vec<ElementKind>>,
    /// Comma-separated cluster ids.
    #[arg(long, value_delimiter = ',')]
    clusters: Option<Vec<usize>>,
    /// Build the reference scenario set of the dimension.
    #[arg(long)]
    preset: bool,
    /// 1.0 masks all matching train samples, 0.5 half of them.
    #[arg(long)]
    mask_fraction: Option<f64>,
    #[arg(long)]
    cluster_model: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    /// Fail on samples whose basis text does not lex.
    #[arg(long)]
    strict_lex: bool,
    /// Also filter the valid partition.
    #[arg(long)]
    filter_valid: bool,
    #[arg(long)]
    token_sizes: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Manifest files or split directories.
    #[arg(long, num_args = 1..)]
    splits: Option<Vec<PathBuf>>,
    /// Predictions file, or a directory of <scenario>.jsonl files.
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Predictions of the model trained without masking.
    #[arg(long)]
    baseline: Option<PathBuf>,
    #[arg(long)]
    bins: Option<usize>,
    /// Report summed instead of length-normalized sequence NLL.
    #[arg(long)]
    unnormalized_nll: bool,
    /// Count samples containing an element instead of occurrences.
    #[arg(long)]
    per_sample_elements: bool,
    #[arg(long)]
    rare_threshold: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    elements: Option<Vec<ElementKind>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, num_args = 1..)]
    reports: Option<Vec<PathBuf>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<()> {
    let file = cli.config.as_deref().map(read_config_file).transpose()?;
    let file = file.as_ref();
    let mut globals = Flags::default();
    globals.set("seed", &cli.seed).set("task", &cli.task).set("basis", &cli.basis);

    let mut f = Flags::default();
    match cli.command {
        Command::Analyze(a) => {
            f.set("corpus", &a.corpus)
                .set("coverage", &a.coverage)
                .set("tol", &a.tol)
                .set("token_sizes", &a.token_sizes)
                .set("out", &a.out);
            let (cfg, echo): (analyze::AnalyzeConfig, Value) = resolve("analyze", file, &globals, &f)?;
            analyze::run(cfg, &echo)
        }
        Command::Cluster(a) => {
            f.set("corpus", &a.corpus)
                .set("embeddings", &a.embeddings)
                .set("k", &a.k)
                .set("k_min", &a.k_min)
                .set("k_max", &a.k_max)
                .set("pca_dim", &a.pca_dim)
                .set("fit_on", &a.fit_on)
                .set("max_iter", &a.max_iter)
                .set("tol", &a.tol)
                .set("n_init", &a.n_init)
                .set("out", &a.out);
            let (cfg, echo): (cluster::ClusterConfig, Value) = resolve("cluster", file, &globals, &f)?;
            cluster::run(cfg, &echo)
        }
        Command::Split(a) => {
            f.set("corpus", &a.corpus)
                .set("dimension", &a.dimension)
                .set("range", &a.range)
                .set("elements", &a.elements)
                .set("clusters", &a.clusters)
                .switch("preset", a.preset)
                .set("mask_fraction", &a.mask_fraction)
                .set("cluster_model", &a.cluster_model)
                .set("name", &a.name)
                .switch("strict_lex", a.strict_lex)
                .switch("filter_valid", a.filter_valid)
                .set("token_sizes", &a.token_sizes)
                .set("out", &a.out);
            let (cfg, echo): (split::SplitConfig, Value) = resolve("split", file, &globals, &f)?;
            split::run(cfg, &echo)
        }
        Command::Eval(a) => {
            f.set("corpus", &a.corpus)
                .set("splits", &a.splits)
                .set("predictions", &a.predictions)
                .set("baseline", &a.baseline)
                .set("bins", &a.bins)
                .set("normalize_nll", &a.unnormalized_nll.then_some(false))
                .switch("per_sample_elements", a.per_sample_elements)
                .set("rare_threshold", &a.rare_threshold)
                .set("elements", &a.elements)
                .set("out", &a.out);
            let (cfg, echo): (eval::EvalConfig, Value) = resolve("eval", file, &globals, &f)?;
            eval::run_eval(cfg, &echo)
        }
        Command::Report(a) => {
            f.set("reports", &a.reports).set("out", &a.out);
            let (cfg, echo): (eval::ReportConfig, Value) = resolve("report", file, &globals, &f)?;
            eval::run_report(cfg, &echo)
        }
    }
}

/// 1 for internal failures, 2 for everything caused by inputs.
fn exit_code(err: &anyhow::Error) -> u8 {
    let internal = err
        .chain()
        .filter_map(|e| e.downcast_ref::<codeood_core::Error>())
        .any(|e| !e.is_validation());
    if internal {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(1),
    }
}
