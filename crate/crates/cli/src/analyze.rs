use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use codeood_core::corpus::{load_corpus, Basis, Corpus, TaskKind};
use codeood_core::distribution::{
    complexity_members, corpus_stats, default_complexity_scenarios, suggest_syntax_scenarios, PropertyTable,
    RangeLabel,
};
use codeood_core::elements::ElementKind;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::require;
use crate::output::{artifact, emit};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub corpus: Option<PathBuf>,
    pub task: TaskKind,
    pub basis: Option<Basis>,
    pub coverage: f64,
    pub tol: f64,
    pub token_sizes: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            task: TaskKind::Text2code,
            basis: None,
            coverage: 0.03,
            tol: 0.01,
            token_sizes: None,
            out: None,
        }
    }
}

#[derive(Deserialize)]
struct SizeRecord {
    id: String,
    token_size: usize,
}

/// Reads `{"id", "token_size"}` lines produced by an external tokenizer.
pub fn load_token_sizes(path: &Path) -> Result<HashMap<String, usize>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut sizes = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: SizeRecord =
            serde_json::from_str(line).with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        sizes.insert(r.id, r.token_size);
    }
    Ok(sizes)
}

pub fn property_table(corpus: &Corpus, basis: Basis, token_sizes: Option<&PathBuf>) -> Result<PropertyTable> {
    let table = PropertyTable::compute(corpus, basis);
    Ok(match token_sizes {
        Some(p) => table.with_token_sizes(corpus, &load_token_sizes(p)?)?,
        None => table,
    })
}

#[derive(Serialize)]
struct RangeSummary {
    range: String,
    label: RangeLabel,
    train_members: usize,
    size_min: usize,
    size_max: usize,
}

#[derive(Serialize)]
struct AnalyzeOutput {
    stats: codeood_core::distribution::CorpusStats,
    suggested_syntax_scenarios: Vec<ElementKind>,
    complexity_scenarios: Vec<RangeSummary>,
    notices: Vec<String>,
}

pub fn run(cfg: AnalyzeConfig, echo: &Value) -> Result<()> {
    let corpus = load_corpus(require(&cfg.corpus, "corpus")?, cfg.task)?;
    let basis = Basis::resolve(cfg.task, cfg.basis);
    let table = property_table(&corpus, basis, cfg.token_sizes.as_ref())?;
    let stats = corpus_stats(&corpus, &table);
    let suggested = suggest_syntax_scenarios(&stats.coverage, cfg.coverage, cfg.tol);

    let mut notices = Vec::new();
    if suggested.is_empty() {
        notices.push(format!(
            "no language element covers {} +/- {} of the train samples",
            cfg.coverage, cfg.tol
        ));
    }
    let mut ranges = Vec::new();
    for range in default_complexity_scenarios() {
        match complexity_members(&corpus, &table, range) {
            Ok(sel) => ranges.push(RangeSummary {
                range: range.to_string(),
                label: range.label(),
                train_members: sel.ids(&corpus, codeood_core::Partition::Train).len(),
                size_min: sel.size_min,
                size_max: sel.size_max,
            }),
            Err(e) => notices.push(e.to_string()),
        }
    }
    let out = AnalyzeOutput {
        stats,
        suggested_syntax_scenarios: suggested,
        complexity_scenarios: ranges,
        notices,
    };
    emit(cfg.out.as_deref(), &artifact("analysis", echo, &out)?)
}
