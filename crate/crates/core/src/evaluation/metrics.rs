use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::elements::{elements_of, ElementHistogram, ElementKind};
use crate::error::{Error, Result};
use crate::lexer::token_texts;

/// Outcome of comparing one prediction with its reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchOutcome {
    Match,
    Mismatch,
    /// The prediction did not lex; scored as a mismatch.
    PredictionLexError,
    /// The reference did not lex; both sides were compared as whitespace
    /// separated words.
    ReferenceLexError { matched: bool },
}

impl MatchOutcome {
    pub fn score(self) -> u8 {
        match self {
            MatchOutcome::Match | MatchOutcome::ReferenceLexError { matched: true } => 1,
            _ => 0,
        }
    }
}

pub fn compare(prediction: &str, target: &str) -> MatchOutcome {
    let reference = match token_texts(target) {
        Ok(t) => t,
        Err(_) => {
            let matched = prediction.split_whitespace().eq(target.split_whitespace());
            return MatchOutcome::ReferenceLexError { matched };
        }
    };
    match token_texts(prediction) {
        Ok(p) if p == reference => MatchOutcome::Match,
        Ok(_) => MatchOutcome::Mismatch,
        Err(_) => MatchOutcome::PredictionLexError,
    }
}

/// 1 if the two programs have the same token sequence, else 0. Layout and
/// comments are ignored.
pub fn exact_match(prediction: &str, target: &str) -> u8 {
    compare(prediction, target).score()
}

/// Tokens for BLEU: the lexer's, or whitespace words if lexing fails.
pub fn bleu_tokens(code: &str) -> (Vec<&str>, bool) {
    match token_texts(code) {
        Ok(t) => (t, true),
        Err(_) => (code.split_whitespace().collect(), false),
    }
}

/// Scenario EM over the EM of the same model trained on unmasked data;
/// undefined when the baseline is 0.
pub fn relative_em(scenario_em: f64, baseline_em: f64) -> Option<f64> {
    (baseline_em > 0.0).then(|| scenario_em / baseline_em)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rarity {
    Unseen,
    Rare,
    Common,
}

impl Rarity {
    /// `unseen` at 0, `rare` up to `rare_threshold` inclusive, else `common`.
    pub fn classify(train_fraction: f64, rare_threshold: f64) -> Self {
        if train_fraction <= 0.0 {
            Rarity::Unseen
        } else if train_fraction <= rare_threshold {
            Rarity::Rare
        } else {
            Rarity::Common
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementFrequency {
    pub gen_count: usize,
    pub gt_count: usize,
    /// `gen_count / gt_count`; null when the references never use the kind.
    pub ratio: Option<f64>,
    pub train_sample_fraction: f64,
    pub rarity: Rarity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyOptions {
    /// Count samples containing a kind instead of occurrences.
    pub per_sample: bool,
    pub rare_threshold: f64,
}

impl Default for FrequencyOptions {
    fn default() -> Self {
        Self {
            per_sample: false,
            rare_threshold: 0.02,
        }
    }
}

/// Pooled generation counts of `kinds` in predictions relative to the
/// references. `train_fraction` gives each kind's sample fraction in the
/// training data, for the rarity label. Predictions or references that do
/// not lex contribute nothing; the second value counts them.
pub fn element_generation_frequency<P: AsRef<str>, R: AsRef<str>>(
    predictions: &[P],
    references: &[R],
    kinds: &[ElementKind],
    train_fraction: impl Fn(ElementKind) -> f64,
    options: FrequencyOptions,
) -> Result<(IndexMap<ElementKind, ElementFrequency>, usize)> {
    if kinds.is_empty() {
        return Err(Error::InvalidArgument("no element kinds to count".into()));
    }
    let mut failures = 0;
    let mut pool = |texts: &mut dyn Iterator<Item = &str>| {
        let mut total = ElementHistogram::default();
        for text in texts {
            match elements_of(text) {
                Ok(h) if options.per_sample => {
                    for (k, n) in h.iter() {
                        if n > 0 {
                            total.add(k, 1);
                        }
                    }
                }
                Ok(h) => total += &h,
                Err(_) => failures += 1,
            }
        }
        total
    };
    let generated = pool(&mut predictions.iter().map(AsRef::as_ref));
    let truth = pool(&mut references.iter().map(AsRef::as_ref));
    let report = kinds
        .iter()
        .map(|&k| {
            let (gen_count, gt_count) = (generated.get(k), truth.get(k));
            let fraction = train_fraction(k);
            (
                k,
                ElementFrequency {
                    gen_count,
                    gt_count,
                    ratio: (gt_count > 0).then(|| gen_count as f64 / gt_count as f64),
                    train_sample_fraction: fraction,
                    rarity: Rarity::classify(fraction, options.rare_threshold),
                },
            )
        })
        .collect();
    Ok((report, failures))
}

/// Negative log-likelihood of one generated sequence: the mean negative
/// token log-probability, or the plain sum when `normalize` is off.
pub fn sequence_nll(logprobs: &[f64], normalize: bool) -> f64 {
    let total: f64 = -logprobs.iter().sum::<f64>();
    if normalize {
        total / logprobs.len() as f64
    } else {
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupHistogram {
    pub n: usize,
    pub counts: Vec<usize>,
    /// `count / (n * width)`, so that the bars integrate to 1.
    pub density: Vec<f64>,
}

impl GroupHistogram {
    pub fn mass(&self, edges: &[f64]) -> f64 {
        self.density
            .iter()
            .zip(edges.windows(2))
            .map(|(d, w)| d * (w[1] - w[0]))
            .sum()
    }
}

/// Density histograms of per-sample NLL for several groups over shared
/// equal-width bins spanning the combined range. Bins are half-open except
/// the last, which includes the maximum. A zero-width range is widened by 0.5
/// on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NllHistogram {
    pub edges: Vec<f64>,
    pub groups: IndexMap<String, GroupHistogram>,
}

pub fn nll_histogram(groups: &IndexMap<String, Vec<f64>>, bins: usize) -> Result<NllHistogram> {
    if bins == 0 {
        return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
    }
    let all = groups.values().flatten().copied();
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return Err(Error::InvalidArgument(
            "no sample carries token log-probabilities".into(),
        ));
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let bin_of = |v: f64| (((v - lo) / width).floor() as usize).min(bins - 1);

    let groups = groups
        .iter()
        .map(|(label, values)| {
            let mut counts = vec![0usize; bins];
            for &v in values {
                counts[bin_of(v)] += 1;
            }
            let n = values.len();
            let density = counts
                .iter()
                .zip(edges.windows(2))
                .map(|(&c, w)| if n == 0 { 0.0 } else { c as f64 / (n as f64 * (w[1] - w[0])) })
                .collect();
            (label.clone(), GroupHistogram { n, counts, density })
        })
        .collect();
    Ok(NllHistogram { edges, groups })
}
