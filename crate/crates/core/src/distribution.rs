//! The corpus distribution along the complexity and syntax dimensions.
//!
//! Complexity regions are percentile ranks over train token sizes: train
//! samples are sorted by `(token_size, file position)` and the range
//! `[a, b]` selects ranks `floor(a/100 * N) .. floor(b/100 * N)`, with `N`
//! the number of train samples that have a size. The token-size interval
//! those ranks cover is then applied by value to valid and test samples.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Basis, Corpus, Partition, TaskKind};
use crate::elements::{extract_elements, ElementHistogram, ElementKind};
use crate::error::{Error, Result};
use crate::lexer::{tokenize, LexError};

/// Lexed properties of one sample's basis text.
#[derive(Debug, Clone)]
pub struct SampleProperties {
    pub token_size: Option<usize>,
    pub elements: Option<ElementHistogram>,
    pub lex_error: Option<LexError>,
}

/// Properties of every sample in a corpus, computed once per basis.
#[derive(Debug, Clone)]
pub struct PropertyTable {
    basis: Basis,
    rows: Vec<SampleProperties>,
}

impl PropertyTable {
    pub fn compute(corpus: &Corpus, basis: Basis) -> Self {
        let rows = corpus
            .samples()
            .par_iter()
            .map(|s| match tokenize(s.text(basis)) {
                Ok(tokens) => SampleProperties {
                    token_size: Some(tokens.len()),
                    elements: Some(extract_elements(&tokens)),
                    lex_error: None,
                },
                Err(e) => SampleProperties {
                    token_size: None,
                    elements: None,
                    lex_error: Some(e),
                },
            })
            .collect();
        Self { basis, rows }
    }

    /// A table with no lexical properties, for predicates that need none.
    pub fn unlexed(corpus: &Corpus, basis: Basis) -> Self {
        let rows = (0..corpus.len())
            .map(|_| SampleProperties {
                token_size: None,
                elements: None,
                lex_error: None,
            })
            .collect();
        Self { basis, rows }
    }

    /// Replaces lexical token counts with externally computed sizes (for
    /// example subword counts from a model tokenizer). Every train and test
    /// sample must be covered.
    pub fn with_token_sizes(mut self, corpus: &Corpus, sizes: &HashMap<String, usize>) -> Result<Self> {
        let mut missing = Vec::new();
        for (row, sample) in self.rows.iter_mut().zip(corpus.samples()) {
            match sizes.get(&sample.id) {
                Some(&n) => row.token_size = Some(n),
                None if sample.partition != Partition::Valid => missing.push(sample.id.clone()),
                None => row.token_size = None,
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingIds {
                what: "token sizes",
                ids: missing,
            });
        }
        if let Some(unknown) = sizes.keys().find(|id| corpus.get(id).is_none()) {
            return Err(Error::UnknownId(unknown.clone()));
        }
        Ok(self)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn row(&self, idx: usize) -> &SampleProperties {
        &self.rows[idx]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn token_size(&self, idx: usize) -> Option<usize> {
        self.rows[idx].token_size
    }

    pub fn elements(&self, idx: usize) -> Option<&ElementHistogram> {
        self.rows[idx].elements.as_ref()
    }

    /// Corpus positions whose basis text failed to lex.
    pub fn lex_failures(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.lex_error.is_some())
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeLabel {
    Interpolation,
    Extrapolation,
}

impl fmt::Display for RangeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RangeLabel::Interpolation => "interpolation",
            RangeLabel::Extrapolation => "extrapolation",
        })
    }
}

/// A percentile-rank region `[lo_pct, hi_pct]` of the train token sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRange {
    pub lo_pct: f64,
    pub hi_pct: f64,
}

impl ComplexityRange {
    pub fn new(lo_pct: f64, hi_pct: f64) -> Result<Self> {
        if !(0.0..100.0).contains(&lo_pct) || !(lo_pct < hi_pct && hi_pct <= 100.0) {
            return Err(Error::InvalidArgument(format!(
                "complexity range [{lo_pct}, {hi_pct}] must satisfy 0 <= lo < hi <= 100"
            )));
        }
        Ok(Self { lo_pct, hi_pct })
    }

    /// Regions touching either tail are extrapolation; the rest interpolate.
    pub fn label(&self) -> RangeLabel {
        if self.lo_pct == 0.0 || self.hi_pct == 100.0 {
            RangeLabel::Extrapolation
        } else {
            RangeLabel::Interpolation
        }
    }

    /// Rank bounds `[lo, hi)` for `n` ranked samples.
    pub fn rank_bounds(&self, n: usize) -> (usize, usize) {
        let at = |pct: f64| ((pct * n as f64) / 100.0).floor() as usize;
        (at(self.lo_pct), at(self.hi_pct).min(n))
    }
}

impl fmt::Display for ComplexityRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo_pct, self.hi_pct)
    }
}

impl FromStr for ComplexityRange {
    type Err = Error;

    /// Parses `lo:hi`, e.g. `97:100`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("complexity range {s:?} is not of the form lo:hi"));
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        ComplexityRange::new(lo, hi)
    }
}

/// The five regions of the reference setup: both tails plus three interior
/// slices, 3 percentiles wide each.
pub fn default_complexity_scenarios() -> [ComplexityRange; 5] {
    [(0.0, 3.0), (24.0, 27.0), (48.0, 51.0), (72.0, 75.0), (97.0, 100.0)]
        .map(|(lo_pct, hi_pct)| ComplexityRange { lo_pct, hi_pct })
}

/// Membership of every corpus sample in a complexity region.
#[derive(Debug, Clone)]
pub struct ComplexitySelection {
    pub range: ComplexityRange,
    /// Inclusive token-size interval covered by the selected train ranks.
    pub size_min: usize,
    pub size_max: usize,
    /// Number of ranked train samples (those with a token size).
    pub ranked: usize,
    member: Vec<bool>,
}

impl ComplexitySelection {
    pub fn is_member(&self, idx: usize) -> bool {
        self.member[idx]
    }

    pub fn ids<'c>(&self, corpus: &'c Corpus, partition: Partition) -> Vec<&'c str> {
        corpus
            .iter_partition(partition)
            .filter(|(i, _)| self.member[*i])
            .map(|(_, s)| s.id.as_str())
            .collect()
    }
}

pub fn complexity_members(corpus: &Corpus, table: &PropertyTable, range: ComplexityRange) -> Result<ComplexitySelection> {
    let mut ranked: Vec<(usize, usize)> = corpus
        .iter_partition(Partition::Train)
        .filter_map(|(i, _)| table.token_size(i).map(|n| (n, i)))
        .collect();
    ranked.sort_unstable();
    let (lo, hi) = range.rank_bounds(ranked.len());
    if lo >= hi {
        return Err(Error::EmptySelection {
            range: range.to_string(),
            n: ranked.len(),
        });
    }
    let size_min = ranked[lo].0;
    let size_max = ranked[hi - 1].0;

    let mut member = vec![false; corpus.len()];
    for &(_, i) in &ranked[lo..hi] {
        member[i] = true;
    }
    for (i, s) in corpus.samples().iter().enumerate() {
        if s.partition != Partition::Train {
            member[i] = table
                .token_size(i)
                .is_some_and(|n| size_min <= n && n <= size_max);
        }
    }
    Ok(ComplexitySelection {
        range,
        size_min,
        size_max,
        ranked: ranked.len(),
        member,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KindCoverage {
    pub kind: ElementKind,
    pub sample_count: usize,
    pub sample_fraction: f64,
    pub occurrence_count: usize,
    pub occurrence_fraction: f64,
}

/// How much of a sample set each element kind covers. Samples whose basis
/// text failed to lex count in the denominator but contain nothing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementCoverage {
    pub n_samples: usize,
    pub lex_failures: usize,
    pub kinds: Vec<KindCoverage>,
}

impl ElementCoverage {
    pub fn over(table: &PropertyTable, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut samples = ElementHistogram::default();
        let mut occurrences = ElementHistogram::default();
        let mut n_samples = 0;
        let mut lex_failures = 0;
        for i in indices {
            n_samples += 1;
            match table.elements(i) {
                Some(h) => {
                    occurrences += h;
                    for (k, n) in h.iter() {
                        if n > 0 {
                            samples.add(k, 1);
                        }
                    }
                }
                None => lex_failures += 1,
            }
        }
        let total_occ = occurrences.total();
        let frac = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let kinds = ElementKind::ALL
            .into_iter()
            .map(|kind| KindCoverage {
                kind,
                sample_count: samples.get(kind),
                sample_fraction: frac(samples.get(kind), n_samples),
                occurrence_count: occurrences.get(kind),
                occurrence_fraction: frac(occurrences.get(kind), total_occ),
            })
            .collect();
        Self {
            n_samples,
            lex_failures,
            kinds,
        }
    }

    pub fn get(&self, kind: ElementKind) -> &KindCoverage {
        &self.kinds[kind.index()]
    }

    pub fn sample_fraction(&self, kind: ElementKind) -> f64 {
        self.get(kind).sample_fraction
    }
}

/// Coverage over the train partition.
pub fn element_coverage(corpus: &Corpus, table: &PropertyTable) -> ElementCoverage {
    ElementCoverage::over(table, corpus.iter_partition(Partition::Train).map(|(i, _)| i))
}

// Absorbs rounding in `target ± tol` so that e.g. 0.02 is inside 0.03 ± 0.01.
const FRACTION_EPS: f64 = 1e-12;

/// Kinds whose train sample fraction lies within `target ± tol`, closest
/// first, ties in taxonomy order.
pub fn suggest_syntax_scenarios(coverage: &ElementCoverage, target: f64, tol: f64) -> Vec<ElementKind> {
    let mut hits: Vec<(f64, ElementKind)> = coverage
        .kinds
        .iter()
        .filter(|c| (c.sample_fraction - target).abs() <= tol + FRACTION_EPS)
        .map(|c| ((c.sample_fraction - target).abs(), c.kind))
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    hits.into_iter().map(|(_, k)| k).collect()
}

/// Order statistics with the lower nearest-rank rule: the q-quantile of `n`
/// sorted values is the value at index `floor(q * (n - 1))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantiles {
    pub n: usize,
    pub min: usize,
    pub p03: usize,
    pub p25: usize,
    pub median: usize,
    pub p75: usize,
    pub p97: usize,
    pub max: usize,
    pub mean: f64,
}

impl Quantiles {
    pub fn of(values: &[usize]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_unstable();
        let at = |q: f64| v[(q * (v.len() - 1) as f64).floor() as usize];
        Some(Self {
            n: v.len(),
            min: v[0],
            p03: at(0.03),
            p25: at(0.25),
            median: at(0.5),
            p75: at(0.75),
            p97: at(0.97),
            max: v[v.len() - 1],
            mean: v.iter().sum::<usize>() as f64 / v.len() as f64,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub task: TaskKind,
    pub basis: Basis,
    pub counts: PartitionCounts,
    pub lex_failures: usize,
    /// Over train basis texts.
    pub token_size: Option<Quantiles>,
    pub coverage: ElementCoverage,
}

pub fn corpus_stats(corpus: &Corpus, table: &PropertyTable) -> CorpusStats {
    let sizes: Vec<usize> = corpus
        .iter_partition(Partition::Train)
        .filter_map(|(i, _)| table.token_size(i))
        .collect();
    CorpusStats {
        task: corpus.task(),
        basis: table.basis(),
        counts: PartitionCounts {
            train: corpus.count(Partition::Train),
            valid: corpus.count(Partition::Valid),
            test: corpus.count(Partition::Test),
        },
        lex_failures: table.lex_failures().len(),
        token_size: Quantiles::of(&sizes),
        coverage: element_coverage(corpus, table),
    }
}
