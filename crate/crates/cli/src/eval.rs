use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use codeood_core::corpus::{load_corpus, Basis, TaskKind};
use codeood_core::elements::ElementKind;
use codeood_core::evaluation::{aggregate, evaluate_scenario, AggregateRow, EvalOptions, EvalReport, FrequencyOptions, PredictionSet};
use codeood_core::splitter::{SplitManifest, MANIFEST_FILE};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::require;
use crate::output::{artifact, fmt_opt, write_csv, write_json};

pub const REPORT_FILE: &str = "report.json";
pub const METRICS: [&str; 3] = ["em", "bleu", "relative_em"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub corpus: Option<PathBuf>,
    pub task: TaskKind,
    pub basis: Option<Basis>,
    /// Manifest files, scenario directories, or split output directories.
    pub splits: Vec<PathBuf>,
    /// One predictions file for every scenario, or a directory holding
    /// `<scenario>.jsonl` per scenario.
    pub predictions: Option<PathBuf>,
    /// Predictions of the same model trained on unmasked data.
    pub baseline: Option<PathBuf>,
    pub bins: usize,
    pub normalize_nll: bool,
    pub per_sample_elements: bool,
    pub rare_threshold: f64,
    pub elements: Option<Vec<ElementKind>>,
    pub out: Option<PathBuf>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            task: TaskKind::Text2code,
            basis: None,
            splits: Vec::new(),
            predictions: None,
            baseline: None,
            bins: 30,
            normalize_nll: true,
            per_sample_elements: false,
            rare_threshold: 0.02,
            elements: None,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// `report.json` files from earlier eval runs.
    pub reports: Vec<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            reports: Vec::new(),
            out: None,
        }
    }
}

/// Expands split paths into manifest files, sorted within each directory.
fn manifest_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for p in paths {
        if p.is_file() {
            found.push(p.clone());
        } else if p.join(MANIFEST_FILE).is_file() {
            found.push(p.join(MANIFEST_FILE));
        } else if p.is_dir() {
            let mut subs: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path().join(MANIFEST_FILE)))
                .filter(|m| m.is_file())
                .collect();
            subs.sort();
            if subs.is_empty() {
                bail!("no {MANIFEST_FILE} under {}", p.display());
            }
            found.extend(subs);
        } else {
            bail!("{}: no such file or directory", p.display());
        }
    }
    if found.is_empty() {
        bail!("missing required setting \"splits\" (flag --splits)");
    }
    Ok(found)
}

fn load_manifest(path: &Path) -> Result<SplitManifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportBundle {
    pub reports: Vec<EvalReport>,
    pub aggregate: Vec<AggregateRow>,
}

pub fn run_eval(cfg: EvalConfig, echo: &Value) -> Result<()> {
    let corpus = load_corpus(require(&cfg.corpus, "corpus")?, cfg.task)?;
    let out = require(&cfg.out, "out")?;
    let predictions = require(&cfg.predictions, "predictions")?;
    let shared = if predictions.is_file() {
        Some(PredictionSet::load(predictions, &corpus)?)
    } else {
        None
    };
    let baseline = cfg.baseline.as_ref().map(|p| PredictionSet::load(p, &corpus)).transpose()?;
    let options = EvalOptions {
        kinds: cfg.elements.clone(),
        frequency: FrequencyOptions {
            per_sample: cfg.per_sample_elements,
            rare_threshold: cfg.rare_threshold,
        },
        bins: cfg.bins,
        normalize_nll: cfg.normalize_nll,
    };

    let mut reports = Vec::new();
    for path in manifest_paths(&cfg.splits)? {
        let manifest = load_manifest(&path)?;
        let own;
        let preds = match &shared {
            Some(p) => p,
            None => {
                own = PredictionSet::load(predictions.join(format!("{}.jsonl", manifest.scenario.name)), &corpus)?;
                &own
            }
        };
        let mut report = evaluate_scenario(&manifest, &corpus, preds, baseline.as_ref(), &options)?;
        for note in &report.diagnostics.notes {
            eprintln!("note: {}: {note}", report.scenario);
        }
        report.config = None;
        reports.push(report);
    }
    write_outputs(out, echo, reports)
}

pub fn run_report(cfg: ReportConfig, echo: &Value) -> Result<()> {
    let out = require(&cfg.out, "out")?;
    if cfg.reports.is_empty() {
        bail!("missing required setting \"reports\" (flag --reports)");
    }
    let mut reports = Vec::new();
    for p in &cfg.reports {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let bundle: ReportBundle =
            serde_json::from_str(&text).with_context(|| format!("parsing report {}", p.display()))?;
        reports.extend(bundle.reports);
    }
    write_outputs(out, echo, reports)
}

fn label(r: &EvalReport) -> String {
    r.range_label.map(|l| l.to_string()).unwrap_or_default()
}

fn write_outputs(out: &Path, echo: &Value, reports: Vec<EvalReport>) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let bundle = ReportBundle {
        aggregate: aggregate(&reports),
        reports,
    };
    write_json(&out.join(REPORT_FILE), &artifact("eval_report", echo, &bundle)?)?;

    let version = crate::output::FORMAT_VERSION.to_string();
    let metric_rows = bundle.reports.iter().flat_map(|r| {
        let values = [Some(r.em), Some(r.bleu), r.relative_em];
        METRICS.iter().zip(values).map(|(m, v)| {
            vec![
                r.scenario.clone(),
                r.dimension.as_str().to_string(),
                label(r),
                r.mask_fraction.to_string(),
                m.to_string(),
                fmt_opt(v),
                version.clone(),
            ]
        })
    });
    write_csv(
        &out.join("metrics.csv"),
        &["scenario", "dimension", "range_label", "mask_fraction", "metric", "value", "format_version"],
        metric_rows,
    )?;

    let element_rows = bundle.reports.iter().flat_map(|r| {
        r.per_element_frequency.iter().map(|(k, f)| {
            vec![
                r.scenario.clone(),
                k.name().to_string(),
                f.gen_count.to_string(),
                f.gt_count.to_string(),
                fmt_opt(f.ratio),
                f.train_sample_fraction.to_string(),
                serde_json::to_value(f.rarity).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            ]
        })
    });
    write_csv(
        &out.join("elements.csv"),
        &["scenario", "element", "gen_count", "gt_count", "ratio", "train_sample_fraction", "rarity"],
        element_rows,
    )?;

    let nll_rows = bundle.reports.iter().flat_map(|r| {
        r.nll_histogram.iter().flat_map(move |h| {
            h.groups.iter().flat_map(move |(group, g)| {
                (0..g.counts.len()).map(move |i| {
                    vec![
                        r.scenario.clone(),
                        group.clone(),
                        h.edges[i].to_string(),
                        h.edges[i + 1].to_string(),
                        g.counts[i].to_string(),
                        g.density[i].to_string(),
                    ]
                })
            })
        })
    });
    write_csv(
        &out.join("nll.csv"),
        &["scenario", "group", "bin_lo", "bin_hi", "count", "density"],
        nll_rows,
    )?;

    let agg_rows = bundle.aggregate.iter().map(|a| {
        vec![
            a.dimension.as_str().to_string(),
            a.group.clone(),
            a.n_scenarios.to_string(),
            a.mean_em.to_string(),
            a.mean_bleu.to_string(),
            fmt_opt(a.mean_relative_em),
            a.n_relative_em.to_string(),
        ]
    });
    write_csv(
        &out.join("aggregate.csv"),
        &["dimension", "group", "n_scenarios", "mean_em", "mean_bleu", "mean_relative_em", "n_relative_em"],
        agg_rows,
    )?;
    for r in &bundle.reports {
        eprintln!("{}: n = {}, em = {:.4}, bleu = {:.4}", r.scenario, r.n_evaluated, r.em, r.bleu);
    }
    Ok(())
}
