//! Scoring model predictions on a split: exact match, corpus BLEU, relative
//! EM against an unmasked baseline, element generation frequency, and NLL
//! histograms.

mod bleu;
mod metrics;
mod predictions;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::Corpus;
use crate::distribution::RangeLabel;
use crate::elements::{elements_of, ElementHistogram, ElementKind};
use crate::error::{Error, Result};
use crate::splitter::{Dimension, ScenarioParams, SplitManifest};

pub use bleu::{corpus_bleu, BleuStats, MAX_ORDER};
pub use metrics::{
    bleu_tokens, compare, element_generation_frequency, exact_match, nll_histogram, relative_em, sequence_nll,
    ElementFrequency, FrequencyOptions, GroupHistogram, MatchOutcome, NllHistogram, Rarity,
};
pub use predictions::{Prediction, PredictionSet};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    /// Element kinds to count; `None` uses the scenario's own elements for
    /// syntax scenarios and the full taxonomy otherwise.
    pub kinds: Option<Vec<ElementKind>>,
    pub frequency: FrequencyOptions,
    pub bins: usize,
    /// Length-normalize sequence NLL.
    pub normalize_nll: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            kinds: None,
            frequency: FrequencyOptions::default(),
            bins: 30,
            normalize_nll: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub prediction_lex_failures: usize,
    pub reference_lex_failures: usize,
    pub element_lex_failures: usize,
    pub missing_logprobs: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub scenario: String,
    pub dimension: Dimension,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_label: Option<RangeLabel>,
    pub mask_fraction: f64,
    pub n_evaluated: usize,
    pub n_exact: usize,
    pub em: f64,
    pub bleu: f64,
    pub baseline_em: Option<f64>,
    pub relative_em: Option<f64>,
    pub per_element_frequency: IndexMap<ElementKind, ElementFrequency>,
    pub nll_histogram: Option<NllHistogram>,
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
}

struct Scored {
    exact: usize,
    bleu: f64,
    pred_lex_failures: usize,
    ref_lex_failures: usize,
}

fn score<'a>(pairs: &[(&'a str, &'a str)]) -> Result<Scored> {
    let per: Vec<(MatchOutcome, BleuStats, bool, bool)> = pairs
        .par_iter()
        .map(|(p, r)| {
            let outcome = compare(p, r);
            let (pt, p_ok) = bleu_tokens(p);
            let (rt, r_ok) = bleu_tokens(r);
            (outcome, BleuStats::of_pair(&pt, &rt), p_ok, r_ok)
        })
        .collect();
    if per.is_empty() {
        return Err(Error::InvalidArgument("no samples to evaluate".into()));
    }
    let mut stats = BleuStats::default();
    let (mut exact, mut pf, mut rf) = (0, 0, 0);
    for (o, s, p_ok, r_ok) in per {
        exact += o.score() as usize;
        stats += s;
        pf += usize::from(!p_ok);
        rf += usize::from(!r_ok);
    }
    Ok(Scored {
        exact,
        bleu: stats.score(),
        pred_lex_failures: pf,
        ref_lex_failures: rf,
    })
}

fn collect_predictions<'p>(ids: &[String], set: &'p PredictionSet, what: &'static str) -> Result<Vec<&'p Prediction>> {
    let missing: Vec<String> = ids.iter().filter(|id| set.get(id).is_none()).cloned().collect();
    if !missing.is_empty() {
        return Err(Error::MissingIds { what, ids: missing });
    }
    Ok(ids.iter().map(|id| set.get(id).expect("checked")).collect())
}

/// Scores `predictions` on the manifest's OOD test samples. Rarity labels use
/// element coverage of the target code over the manifest's accepted train
/// samples.
pub fn evaluate_scenario(
    manifest: &SplitManifest,
    corpus: &Corpus,
    predictions: &PredictionSet,
    baseline: Option<&PredictionSet>,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let ids = &manifest.ood_test_ids;
    let preds = collect_predictions(ids, predictions, "predictions")?;
    let refs: Vec<&str> = ids
        .iter()
        .map(|id| corpus.get(id).map(|s| s.target.as_str()).ok_or_else(|| Error::UnknownId(id.clone())))
        .collect::<Result<_>>()?;
    let texts: Vec<&str> = preds.iter().map(|p| p.prediction.as_str()).collect();
    let pairs: Vec<(&str, &str)> = texts.iter().copied().zip(refs.iter().copied()).collect();
    let scored = score(&pairs)?;
    let n = ids.len();
    let em = scored.exact as f64 / n as f64;

    let mut diagnostics = Diagnostics {
        prediction_lex_failures: scored.pred_lex_failures,
        reference_lex_failures: scored.ref_lex_failures,
        ..Default::default()
    };

    let (baseline_em, relative) = match baseline {
        Some(b) => {
            let bp = collect_predictions(ids, b, "baseline predictions")?;
            let bpairs: Vec<(&str, &str)> = bp.iter().map(|p| p.prediction.as_str()).zip(refs.iter().copied()).collect();
            let b_em = score(&bpairs)?.exact as f64 / n as f64;
            let rel = relative_em(em, b_em);
            if rel.is_none() {
                diagnostics.notes.push("baseline EM is 0; relative EM is undefined".into());
            }
            (Some(b_em), rel)
        }
        None => (None, None),
    };

    let kinds: Vec<ElementKind> = match (&options.kinds, &manifest.scenario.params) {
        (Some(k), _) => k.clone(),
        (None, ScenarioParams::Syntax { elements }) if !elements.is_empty() => elements.clone(),
        _ => ElementKind::ALL.to_vec(),
    };
    let train_hists: Vec<Option<ElementHistogram>> = manifest
        .train_ids
        .par_iter()
        .map(|id| corpus.get(id).and_then(|s| elements_of(&s.target).ok()))
        .collect();
    let n_train = train_hists.len().max(1) as f64;
    let train_fraction = |k: ElementKind| {
        train_hists.iter().filter(|h| h.as_ref().is_some_and(|h| h.contains(k))).count() as f64 / n_train
    };
    let (per_element_frequency, element_failures) =
        element_generation_frequency(&texts, &refs, &kinds, train_fraction, options.frequency)?;
    diagnostics.element_lex_failures = element_failures;
    let undefined: Vec<&str> = per_element_frequency
        .iter()
        .filter(|(_, f)| f.ratio.is_none())
        .map(|(k, _)| k.name())
        .collect();
    if !undefined.is_empty() {
        diagnostics.notes.push(format!(
            "no reference uses {}; generation ratio undefined",
            undefined.join(", ")
        ));
    }

    let mut groups: IndexMap<String, Vec<f64>> = IndexMap::new();
    let mut nll_group = |label: &str, set: &[&Prediction], missing: &mut usize| {
        let values: Vec<f64> = set
            .iter()
            .filter_map(|p| match &p.token_logprobs {
                Some(lp) => Some(sequence_nll(lp, options.normalize_nll)),
                None => {
                    *missing += 1;
                    None
                }
            })
            .collect();
        if !values.is_empty() {
            groups.insert(label.to_string(), values);
        }
    };
    let mut missing = 0;
    nll_group("scenario", &preds, &mut missing);
    if let Some(b) = baseline {
        let bp = collect_predictions(ids, b, "baseline predictions")?;
        nll_group("baseline", &bp, &mut missing);
    }
    diagnostics.missing_logprobs = missing;
    let nll = if groups.is_empty() {
        diagnostics.notes.push("no token log-probabilities; NLL histogram skipped".into());
        None
    } else {
        Some(nll_histogram(&groups, options.bins)?)
    };

    Ok(EvalReport {
        format_version: REPORT_FORMAT_VERSION,
        scenario: manifest.scenario.name.clone(),
        dimension: manifest.scenario.dimension(),
        range_label: manifest.range_label,
        mask_fraction: manifest.scenario.mask_fraction,
        n_evaluated: n,
        n_exact: scored.exact,
        em,
        bleu: scored.bleu,
        baseline_em,
        relative_em: relative,
        per_element_frequency,
        nll_histogram: nll,
        diagnostics,
        config: None,
    })
}

/// Mean scores over the scenarios of one dimension. Complexity scenarios are
/// additionally grouped by interpolation and extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub dimension: Dimension,
    /// `all`, `interpolation` or `extrapolation`.
    pub group: String,
    pub n_scenarios: usize,
    pub mean_em: f64,
    pub mean_bleu: f64,
    /// Mean over scenarios whose relative EM is defined.
    pub mean_relative_em: Option<f64>,
    pub n_relative_em: usize,
}

pub fn aggregate(reports: &[EvalReport]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    for dim in [Dimension::Complexity, Dimension::Syntax, Dimension::Semantics] {
        let of_dim: Vec<&EvalReport> = reports.iter().filter(|r| r.dimension == dim).collect();
        if of_dim.is_empty() {
            continue;
        }
        let mut groups: Vec<(String, Vec<&EvalReport>)> = vec![("all".into(), of_dim.clone())];
        if dim == Dimension::Complexity {
            for label in [RangeLabel::Interpolation, RangeLabel::Extrapolation] {
                let g: Vec<&EvalReport> = of_dim.iter().copied().filter(|r| r.range_label == Some(label)).collect();
                if !g.is_empty() {
                    groups.push((label.to_string(), g));
                }
            }
        }
        for (group, rs) in groups {
            let n = rs.len() as f64;
            let rel: Vec<f64> = rs.iter().filter_map(|r| r.relative_em).collect();
            rows.push(AggregateRow {
                dimension: dim,
                group,
                n_scenarios: rs.len(),
                mean_em: rs.iter().map(|r| r.em).sum::<f64>() / n,
                mean_bleu: rs.iter().map(|r| r.bleu).sum::<f64>() / n,
                mean_relative_em: (!rel.is_empty()).then(|| rel.iter().sum::<f64>() / rel.len() as f64),
                n_relative_em: rel.len(),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CodeSample, Partition, TaskKind};
    use crate::splitter::{build_split, ScenarioSpec};

    fn corpus() -> Corpus {
        let mut samples = Vec::new();
        for i in 0..30 {
            let t = if i % 3 == 0 {
                format!("while (a{i} >= 0) {{ a{i}--; }}")
            } else {
                format!("return a{i};")
            };
            samples.push(CodeSample::new(format!("tr{i}"), Partition::Train, "", t));
        }
        for i in 0..10 {
            let t = format!("while (b{i} >= 1) {{ if (c) break; }}");
            samples.push(CodeSample::new(format!("te{i}"), Partition::Test, "", t));
        }
        samples.push(CodeSample::new("te_plain", Partition::Test, "", "return 0;"));
        Corpus::from_samples(TaskKind::Text2code, samples).unwrap()
    }

    fn manifest(c: &Corpus) -> SplitManifest {
        let spec = ScenarioSpec::new(
            "while",
            ScenarioParams::Syntax {
                elements: vec![ElementKind::WhileStatement],
            },
        );
        build_split(c, &spec, None).unwrap()
    }

    #[test]
    fn self_predictions_score_perfectly() {
        let c = corpus();
        let m = manifest(&c);
        let preds = PredictionSet::self_predictions(&c);
        let r = evaluate_scenario(&m, &c, &preds, Some(&preds), &EvalOptions::default()).unwrap();
        assert_eq!(r.n_evaluated, 10);
        assert_eq!(r.em, 1.0);
        assert_eq!(r.bleu, 1.0);
        assert_eq!(r.relative_em, Some(1.0));
        assert_eq!(r.per_element_frequency[&ElementKind::WhileStatement].ratio, Some(1.0));
        assert_eq!(r.per_element_frequency[&ElementKind::WhileStatement].rarity, Rarity::Unseen);
        assert!(r.nll_histogram.is_none());
    }

    #[test]
    fn counts_exact_matches() {
        let c = corpus();
        let m = manifest(&c);
        let mut preds = PredictionSet::self_predictions(&c);
        for i in 4..10 {
            preds.insert(format!("te{i}"), "return 1;", Some(vec![-0.5, -1.5, -1.0]));
        }
        let r = evaluate_scenario(&m, &c, &preds, None, &EvalOptions::default()).unwrap();
        assert_eq!(r.em, 0.4);
        assert!(r.bleu < 1.0);
        assert_eq!(r.relative_em, None);
        assert_eq!(r.diagnostics.missing_logprobs, 4);
        let h = r.nll_histogram.unwrap();
        assert_eq!(h.groups["scenario"].n, 6);
    }

    #[test]
    fn missing_predictions_listed() {
        let c = corpus();
        let m = manifest(&c);
        let mut preds = PredictionSet::default();
        preds.insert("te0", "x", None);
        match evaluate_scenario(&m, &c, &preds, None, &EvalOptions::default()) {
            Err(Error::MissingIds { ids, .. }) => assert_eq!(ids.len(), 9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn aggregation_means() {
        let c = corpus();
        let m = manifest(&c);
        let preds = PredictionSet::self_predictions(&c);
        let mut a = evaluate_scenario(&m, &c, &preds, Some(&preds), &EvalOptions::default()).unwrap();
        let mut b = a.clone();
        a.relative_em = Some(0.4);
        b.relative_em = Some(0.8);
        let mut d = a.clone();
        d.relative_em = None;
        let rows = aggregate(&[a, b, d]);
        assert_eq!(rows.len(), 1);
        assert!((rows[0].mean_relative_em.unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(rows[0].n_scenarios, 3);
        assert_eq!(rows[0].n_relative_em, 2);
    }
}
