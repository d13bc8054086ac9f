//! Rejection-sampling splits.
//!
//! A scenario names a set of unwanted properties. Every sample gets the
//! predicate `P(x) in P~` and the accept function is `f(x) = 1 - [P(x) in P~]`.
//! On a finite corpus this is plain exhaustive filtering: train samples with
//! the property are rejected (all of them, or a seeded subset when
//! `mask_fraction < 1`) and the OOD test set is every test sample that has it.
//!
//! Mask selection: the property-matching train ids are sorted ascending
//! (byte order), shuffled with [`SplitMix64`] seeded by the scenario seed, and
//! the first `round_half_up(mask_fraction * n)` are masked. A larger fraction
//! therefore always masks a superset.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{Basis, Corpus, Partition};
use crate::distribution::{complexity_members, ComplexityRange, PropertyTable, RangeLabel};
use crate::elements::ElementKind;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::semantics::ClusterModel;

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Complexity,
    Syntax,
    Semantics,
}

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Complexity => "complexity",
            Dimension::Syntax => "syntax",
            Dimension::Semantics => "semantics",
        }
    }
}

impl std::str::FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complexity" => Ok(Dimension::Complexity),
            "syntax" => Ok(Dimension::Syntax),
            "semantics" => Ok(Dimension::Semantics),
            other => Err(Error::InvalidArgument(format!(
                "unknown dimension {other:?} (expected complexity, syntax or semantics)"
            ))),
        }
    }
}

/// The unwanted property set, typed by dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dimension", rename_all = "lowercase")]
pub enum ScenarioParams {
    Complexity { range: ComplexityRange },
    Syntax { elements: Vec<ElementKind> },
    Semantics { clusters: Vec<usize> },
}

impl ScenarioParams {
    pub fn dimension(&self) -> Dimension {
        match self {
            ScenarioParams::Complexity { .. } => Dimension::Complexity,
            ScenarioParams::Syntax { .. } => Dimension::Syntax,
            ScenarioParams::Semantics { .. } => Dimension::Semantics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(flatten)]
    pub params: ScenarioParams,
    /// Text field carrying the property; defaults from the task.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Basis>,
    /// 1.0 masks every matching train sample (OOD), 0.5 half (generalization).
    pub mask_fraction: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(name: impl Into<String>, params: ScenarioParams) -> Self {
        Self {
            name: name.into(),
            params,
            basis: None,
            mask_fraction: 1.0,
            seed: 0,
        }
    }

    pub fn with_mask_fraction(mut self, m: f64) -> Self {
        self.mask_fraction = m;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_basis(mut self, basis: Option<Basis>) -> Self {
        self.basis = basis;
        self
    }

    pub fn dimension(&self) -> Dimension {
        self.params.dimension()
    }

    fn validate(&self) -> Result<()> {
        if !(self.mask_fraction > 0.0 && self.mask_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "mask fraction {} must lie in (0, 1]",
                self.mask_fraction
            )));
        }
        Ok(())
    }
}

/// Number of samples masked out of `n` candidates.
pub fn mask_count(mask_fraction: f64, n: usize) -> usize {
    ((mask_fraction * n as f64 + 0.5).floor() as usize).min(n)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitOptions {
    /// Fail on samples whose basis text does not lex instead of keeping them.
    pub strict_lex: bool,
    /// Also drop property-matching samples from the valid partition.
    pub filter_valid: bool,
}

/// `P(x) in P~` evaluated for every corpus position.
#[derive(Debug, Clone)]
pub struct PropertyPredicate {
    matches: Vec<bool>,
    /// Positions whose basis text failed to lex (always predicate-false).
    lex_failures: Vec<usize>,
    /// Inclusive token-size interval for complexity scenarios.
    pub size_interval: Option<(usize, usize)>,
}

impl PropertyPredicate {
    pub fn at(&self, idx: usize) -> bool {
        self.matches[idx]
    }

    pub fn matches(&self, corpus: &Corpus, id: &str) -> bool {
        corpus.position(id).is_some_and(|i| self.matches[i])
    }

    /// Accept function of the rejection sampler.
    pub fn accept(&self, idx: usize) -> bool {
        !self.matches[idx]
    }

    pub fn lex_failures(&self) -> &[usize] {
        &self.lex_failures
    }
}

/// Evaluates a scenario's predicate over the whole corpus. `table` must hold the
/// properties of the scenario's resolved basis; `aux` is the cluster model and is
/// required exactly for semantic scenarios.
pub fn property_predicate(
    spec: &ScenarioSpec,
    corpus: &Corpus,
    table: &PropertyTable,
    aux: Option<&ClusterModel>,
    options: SplitOptions,
) -> Result<PropertyPredicate> {
    let basis = Basis::resolve(corpus.task(), spec.basis);
    if table.basis() != basis {
        return Err(Error::Internal(format!(
            "property table built for basis {:?}, scenario needs {basis:?}",
            table.basis()
        )));
    }
    let relevant = |p: Partition| p != Partition::Valid || options.filter_valid;

    let mut lex_failures = Vec::new();
    if spec.dimension() != Dimension::Semantics {
        for i in table.lex_failures() {
            let sample = &corpus.samples()[i];
            if options.strict_lex && relevant(sample.partition) {
                return Err(Error::Lex {
                    id: sample.id.clone(),
                    source: table.row(i).lex_error.clone().expect("listed as a failure"),
                });
            }
            lex_failures.push(i);
        }
    }

    let mut size_interval = None;
    let matches: Vec<bool> = match &spec.params {
        ScenarioParams::Complexity { range } => {
            let sel = complexity_members(corpus, table, *range)?;
            let (lo, hi) = (sel.size_min, sel.size_max);
            size_interval = Some((lo, hi));
            (0..corpus.len())
                .map(|i| table.token_size(i).is_some_and(|n| lo <= n && n <= hi))
                .collect()
        }
        ScenarioParams::Syntax { elements } => (0..corpus.len())
            .map(|i| {
                table
                    .elements(i)
                    .is_some_and(|h| elements.iter().any(|&k| h.contains(k)))
            })
            .collect(),
        ScenarioParams::Semantics { clusters } => {
            let model = aux.ok_or_else(|| {
                Error::InvalidArgument("semantic scenarios need a cluster model".into())
            })?;
            model.validate()?;
            let mut wanted = vec![false; model.k];
            for &c in clusters {
                if c >= model.k {
                    return Err(Error::ClusterOutOfRange { cluster: c, k: model.k });
                }
                wanted[c] = true;
            }
            let mut missing = Vec::new();
            let matches = corpus
                .samples()
                .iter()
                .map(|s| match model.cluster_of(&s.id) {
                    Some(c) => wanted[c],
                    None => {
                        if relevant(s.partition) {
                            missing.push(s.id.clone());
                        }
                        false
                    }
                })
                .collect();
            if !missing.is_empty() {
                return Err(Error::MissingIds {
                    what: "cluster assignments",
                    ids: missing,
                });
            }
            matches
        }
    };
    Ok(PropertyPredicate {
        matches,
        lex_failures,
        size_interval,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitStats {
    pub n_train: usize,
    pub n_property_train: usize,
    pub n_masked_train: usize,
    pub n_kept_train: usize,
    /// Masked share of the train partition (about 0.03 for the reference
    /// scenarios).
    pub rejected_train_fraction: f64,
    pub n_valid: usize,
    pub n_masked_valid: usize,
    pub n_test: usize,
    pub n_ood_test: usize,
    /// Samples whose basis text failed to lex; they count as lacking the
    /// property.
    pub lex_failures: usize,
}

/// A finished split. All id lists are in corpus order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub format_version: u32,
    pub scenario: ScenarioSpec,
    pub basis: Basis,
    pub options: SplitOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_label: Option<RangeLabel>,
    /// Inclusive token-size interval of a complexity scenario.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_interval: Option<(usize, usize)>,
    pub stats: SplitStats,
    pub warnings: Vec<String>,
    /// Accepted train samples.
    pub train_ids: Vec<String>,
    /// Rejected train samples.
    pub masked_train_ids: Vec<String>,
    /// Property-matching train samples that stayed because of partial masking.
    pub kept_property_train_ids: Vec<String>,
    pub valid_ids: Vec<String>,
    pub masked_valid_ids: Vec<String>,
    pub ood_test_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lex_failure_ids: Vec<String>,
    /// Resolved run configuration of the tool that produced the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
}

/// Picks which of `candidates` (corpus positions) are masked.
fn select_masked(corpus: &Corpus, candidates: &[usize], fraction: f64, rng: &mut SplitMix64) -> Vec<bool> {
    let mut sorted: Vec<usize> = candidates.to_vec();
    sorted.sort_unstable_by(|&a, &b| corpus.samples()[a].id.cmp(&corpus.samples()[b].id));
    rng.shuffle(&mut sorted);
    let mut masked = vec![false; corpus.len()];
    for &i in &sorted[..mask_count(fraction, sorted.len())] {
        masked[i] = true;
    }
    masked
}

/// Builds the split for `spec` given an already evaluated predicate.
pub fn split_with_predicate(
    corpus: &Corpus,
    spec: &ScenarioSpec,
    predicate: &PropertyPredicate,
    options: SplitOptions,
) -> Result<SplitManifest> {
    spec.validate()?;
    let positions = |p: Partition| -> Vec<usize> { corpus.iter_partition(p).map(|(i, _)| i).collect() };
    let train = positions(Partition::Train);
    let valid = positions(Partition::Valid);
    let test = positions(Partition::Test);
    let property = |idx: &[usize]| -> Vec<usize> { idx.iter().copied().filter(|&i| predicate.at(i)).collect() };

    let property_train = property(&train);
    let masked = select_masked(corpus, &property_train, spec.mask_fraction, &mut SplitMix64::new(spec.seed));
    let masked_valid = if options.filter_valid {
        select_masked(
            corpus,
            &property(&valid),
            spec.mask_fraction,
            &mut SplitMix64::derive(spec.seed, 1),
        )
    } else {
        vec![false; corpus.len()]
    };
    let ood_test = property(&test);

    let id = |i: &usize| corpus.samples()[*i].id.clone();
    let ids_where = |idx: &[usize], f: &dyn Fn(usize) -> bool| -> Vec<String> {
        idx.iter().filter(|&&i| f(i)).map(id).collect()
    };

    let mut warnings = Vec::new();
    if ood_test.is_empty() {
        return Err(Error::UnevaluableScenario { name: spec.name.clone() });
    }
    if property_train.is_empty() {
        warnings.push(format!(
            "scenario {:?} matches no train samples; the split equals the full training set",
            spec.name
        ));
    }
    let lex_failure_ids: Vec<String> = predicate.lex_failures().iter().map(id).collect();
    if !lex_failure_ids.is_empty() {
        warnings.push(format!(
            "{} sample(s) failed to lex and were treated as lacking the property",
            lex_failure_ids.len()
        ));
    }

    let train_ids = ids_where(&train, &|i| !masked[i]);
    let masked_train_ids = ids_where(&train, &|i| masked[i]);
    let kept_property_train_ids = ids_where(&train, &|i| predicate.at(i) && !masked[i]);
    let valid_ids = ids_where(&valid, &|i| !masked_valid[i]);
    let masked_valid_ids = ids_where(&valid, &|i| masked_valid[i]);

    let stats = SplitStats {
        n_train: train.len(),
        n_property_train: property_train.len(),
        n_masked_train: masked_train_ids.len(),
        n_kept_train: train_ids.len(),
        rejected_train_fraction: masked_train_ids.len() as f64 / train.len() as f64,
        n_valid: valid.len(),
        n_masked_valid: masked_valid_ids.len(),
        n_test: test.len(),
        n_ood_test: ood_test.len(),
        lex_failures: lex_failure_ids.len(),
    };
    let range_label = match &spec.params {
        ScenarioParams::Complexity { range } => Some(range.label()),
        _ => None,
    };
    Ok(SplitManifest {
        format_version: MANIFEST_FORMAT_VERSION,
        scenario: spec.clone(),
        basis: Basis::resolve(corpus.task(), spec.basis),
        options,
        range_label,
        size_interval: predicate.size_interval,
        stats,
        warnings,
        train_ids,
        masked_train_ids,
        kept_property_train_ids,
        valid_ids,
        masked_valid_ids,
        ood_test_ids: ood_test.iter().map(id).collect(),
        lex_failure_ids,
        config: None,
    })
}

/// Splits one corpus under many scenarios, lexing each basis text at most
/// once.
pub struct ScenarioSplitter<'c> {
    corpus: &'c Corpus,
    tables: [OnceLock<PropertyTable>; 2],
    options: SplitOptions,
}

impl<'c> ScenarioSplitter<'c> {
    pub fn new(corpus: &'c Corpus) -> Self {
        Self {
            corpus,
            tables: [OnceLock::new(), OnceLock::new()],
            options: SplitOptions::default(),
        }
    }

    pub fn with_options(mut self, options: SplitOptions) -> Self {
        self.options = options;
        self
    }

    /// Uses a precomputed table (for example one with external token sizes)
    /// for its basis.
    pub fn with_table(self, table: PropertyTable) -> Self {
        let slot = &self.tables[Self::slot(table.basis())];
        let _ = slot.set(table);
        self
    }

    fn slot(basis: Basis) -> usize {
        match basis {
            Basis::Input => 0,
            Basis::Target => 1,
        }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn table(&self, basis: Basis) -> &PropertyTable {
        self.tables[Self::slot(basis)].get_or_init(|| PropertyTable::compute(self.corpus, basis))
    }

    pub fn predicate(&self, spec: &ScenarioSpec, aux: Option<&ClusterModel>) -> Result<PropertyPredicate> {
        let basis = Basis::resolve(self.corpus.task(), spec.basis);
        // Cluster membership needs no lexing; skip it unless a table exists.
        if spec.dimension() == Dimension::Semantics && self.tables[Self::slot(basis)].get().is_none() {
            let table = PropertyTable::unlexed(self.corpus, basis);
            return property_predicate(spec, self.corpus, &table, aux, self.options);
        }
        property_predicate(spec, self.corpus, self.table(basis), aux, self.options)
    }

    pub fn build(&self, spec: &ScenarioSpec, aux: Option<&ClusterModel>) -> Result<SplitManifest> {
        let predicate = self.predicate(spec, aux)?;
        split_with_predicate(self.corpus, spec, &predicate, self.options)
    }
}

/// One-shot form of [`ScenarioSplitter::build`].
pub fn build_split(corpus: &Corpus, spec: &ScenarioSpec, aux: Option<&ClusterModel>) -> Result<SplitManifest> {
    ScenarioSplitter::new(corpus).build(spec, aux)
}

pub const TRAIN_FILE: &str = "train.jsonl";
pub const VALID_FILE: &str = "valid.jsonl";
pub const TEST_FILE: &str = "test_ood.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes the filtered train, valid and OOD test files (corpus line format,
/// corpus order) plus the manifest into `out_dir`.
pub fn emit_training_files(manifest: &SplitManifest, corpus: &Corpus, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let write = |name: &str, ids: &[String]| -> Result<()> {
        let path = out_dir.join(name);
        let samples = ids
            .iter()
            .map(|id| corpus.get(id).ok_or_else(|| Error::UnknownId(id.clone())))
            .collect::<Result<Vec<_>>>()?;
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        Corpus::write_jsonl(&mut w, samples)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))
    };
    write(TRAIN_FILE, &manifest.train_ids)?;
    write(VALID_FILE, &manifest.valid_ids)?;
    write(TEST_FILE, &manifest.ood_test_ids)?;

    let path = out_dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
