use std::path::PathBuf;

use anyhow::{bail, Result};
use codeood_core::corpus::{load_corpus, Basis, TaskKind};
use codeood_core::distribution::{default_complexity_scenarios, ComplexityRange};
use codeood_core::elements::ElementKind;
use codeood_core::rng::SplitMix64;
use codeood_core::splitter::{
    emit_training_files, Dimension, ScenarioParams, ScenarioSpec, ScenarioSplitter, SplitManifest, SplitOptions,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analyze::property_table;
use crate::cluster::load_model;
use crate::config::require;
use crate::output::{artifact, write_json};

pub const INDEX_FILE: &str = "splits.json";
/// Clusters drawn per semantic preset.
pub const PRESET_CLUSTERS: usize = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub corpus: Option<PathBuf>,
    pub task: TaskKind,
    pub basis: Option<Basis>,
    pub seed: u64,
    pub dimension: Option<Dimension>,
    /// Complexity range `lo:hi` in train percentiles.
    pub range: Option<String>,
    pub elements: Option<Vec<ElementKind>>,
    pub clusters: Option<Vec<usize>>,
    /// Run the reference scenario set of the dimension instead.
    pub preset: bool,
    pub mask_fraction: f64,
    pub cluster_model: Option<PathBuf>,
    pub name: Option<String>,
    pub strict_lex: bool,
    pub filter_valid: bool,
    pub token_sizes: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            task: TaskKind::Text2code,
            basis: None,
            seed: 0,
            dimension: None,
            range: None,
            elements: None,
            clusters: None,
            preset: false,
            mask_fraction: 1.0,
            cluster_model: None,
            name: None,
            strict_lex: false,
            filter_valid: false,
            token_sizes: None,
            out: None,
        }
    }
}

/// File-system friendly element name.
fn slug(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::GeOperator => "ge",
        ElementKind::OrOperator => "or",
        k => k.name(),
    }
}

fn default_name(params: &ScenarioParams, mask_fraction: f64) -> String {
    let base = match params {
        ScenarioParams::Complexity { range } => format!("complexity_{}-{}", range.lo_pct, range.hi_pct),
        ScenarioParams::Syntax { elements } => {
            let parts: Vec<&str> = elements.iter().map(|&k| slug(k)).collect();
            format!("syntax_{}", parts.join("+"))
        }
        ScenarioParams::Semantics { clusters } => {
            let parts: Vec<String> = clusters.iter().map(|c| format!("c{c}")).collect();
            format!("semantics_{}", parts.join("+"))
        }
    };
    if mask_fraction < 1.0 {
        format!("{base}_mask{}", (mask_fraction * 100.0).round())
    } else {
        base
    }
}

/// Five distinct clusters drawn with the run seed, ascending.
pub fn preset_clusters(k: usize, seed: u64) -> Vec<usize> {
    let mut all: Vec<usize> = (0..k).collect();
    SplitMix64::new(seed).shuffle(&mut all);
    let mut picked: Vec<usize> = all.into_iter().take(PRESET_CLUSTERS).collect();
    picked.sort_unstable();
    picked
}

fn scenario_params(cfg: &SplitConfig, k: Option<usize>) -> Result<Vec<ScenarioParams>> {
    let Some(dimension) = cfg.dimension else {
        bail!("missing required setting \"dimension\" (flag --dimension)");
    };
    if cfg.preset {
        return Ok(match dimension {
            Dimension::Complexity => default_complexity_scenarios()
                .into_iter()
                .map(|range| ScenarioParams::Complexity { range })
                .collect(),
            Dimension::Syntax => ElementKind::preset(cfg.task)
                .into_iter()
                .map(|k| ScenarioParams::Syntax { elements: vec![k] })
                .collect(),
            Dimension::Semantics => preset_clusters(k.expect("model loaded"), cfg.seed)
                .into_iter()
                .map(|c| ScenarioParams::Semantics { clusters: vec![c] })
                .collect(),
        });
    }
    Ok(vec![match dimension {
        Dimension::Complexity => {
            let Some(r) = &cfg.range else {
                bail!("complexity scenarios need --range lo:hi (or --preset)");
            };
            ScenarioParams::Complexity {
                range: r.parse::<ComplexityRange>()?,
            }
        }
        Dimension::Syntax => {
            let Some(e) = &cfg.elements else {
                bail!("syntax scenarios need --elements (or --preset)");
            };
            ScenarioParams::Syntax { elements: e.clone() }
        }
        Dimension::Semantics => {
            let Some(c) = &cfg.clusters else {
                bail!("semantic scenarios need --clusters (or --preset)");
            };
            ScenarioParams::Semantics { clusters: c.clone() }
        }
    }])
}

#[derive(Serialize)]
struct IndexEntry<'a> {
    name: &'a str,
    dir: &'a str,
    stats: &'a codeood_core::splitter::SplitStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    range_label: Option<codeood_core::distribution::RangeLabel>,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct SplitIndex<'a> {
    scenarios: Vec<IndexEntry<'a>>,
}

pub fn run(cfg: SplitConfig, echo: &Value) -> Result<()> {
    let corpus = load_corpus(require(&cfg.corpus, "corpus")?, cfg.task)?;
    let out = require(&cfg.out, "out")?;
    let model = match (&cfg.cluster_model, cfg.dimension) {
        (Some(p), _) => Some(load_model(p)?),
        (None, Some(Dimension::Semantics)) => bail!("semantic scenarios need --cluster-model"),
        (None, _) => None,
    };
    let all_params = scenario_params(&cfg, model.as_ref().map(|m| m.k))?;
    if cfg.name.is_some() && all_params.len() > 1 {
        bail!("--name applies to a single scenario, not a preset");
    }

    let basis = Basis::resolve(cfg.task, cfg.basis);
    let options = SplitOptions {
        strict_lex: cfg.strict_lex,
        filter_valid: cfg.filter_valid,
    };
    let splitter = ScenarioSplitter::new(&corpus)
        .with_options(options)
        .with_table(property_table(&corpus, basis, cfg.token_sizes.as_ref())?);

    let mut manifests: Vec<SplitManifest> = Vec::new();
    for params in all_params {
        let name = cfg
            .name
            .clone()
            .unwrap_or_else(|| default_name(&params, cfg.mask_fraction));
        let spec = ScenarioSpec {
            name,
            params,
            basis: cfg.basis,
            mask_fraction: cfg.mask_fraction,
            seed: cfg.seed,
        };
        let mut manifest = splitter.build(&spec, model.as_ref())?;
        manifest.config = Some(echo.clone());
        for w in &manifest.warnings {
            eprintln!("warning: {}: {w}", spec.name);
        }
        emit_training_files(&manifest, &corpus, &out.join(&spec.name))?;
        manifests.push(manifest);
    }

    let index = SplitIndex {
        scenarios: manifests
            .iter()
            .map(|m| IndexEntry {
                name: &m.scenario.name,
                dir: &m.scenario.name,
                stats: &m.stats,
                range_label: m.range_label,
                warnings: &m.warnings,
            })
            .collect(),
    };
    write_json(&out.join(INDEX_FILE), &artifact("split_index", echo, &index)?)?;
    for m in &manifests {
        eprintln!(
            "{}: masked {} of {} train samples ({:.2}%), {} OOD test samples",
            m.scenario.name,
            m.stats.n_masked_train,
            m.stats.n_train,
            100.0 * m.stats.rejected_train_fraction,
            m.stats.n_ood_test
        );
    }
    Ok(())
}
