//! Properties that hold for every split.

use std::collections::BTreeSet;

use codeood_core::corpus::{Corpus, Partition, TaskKind};
use codeood_core::elements::{elements_of, ElementKind};
use codeood_core::splitter::{mask_count, ScenarioParams, ScenarioSpec, ScenarioSplitter, SplitOptions};
use codeood_core::synth::{synth_corpus, SynthConfig};
use codeood_core::Error;
use proptest::prelude::*;

fn corpus() -> &'static Corpus {
    static CORPUS: std::sync::OnceLock<Corpus> = std::sync::OnceLock::new();
    CORPUS.get_or_init(|| {
        let cfg = SynthConfig {
            n_train: 300,
            n_valid: 50,
            n_test: 80,
            element_rate: 0.05,
            seed: 77,
        };
        Corpus::from_samples(TaskKind::Text2code, synth_corpus(&cfg).into_iter().map(|s| s.sample).collect())
            .unwrap()
    })
}

fn params() -> impl Strategy<Value = ScenarioParams> {
    prop_oneof![
        (0u32..97, 1u32..10).prop_map(|(lo, w)| ScenarioParams::Complexity {
            range: format!("{lo}:{}", (lo + w).min(100)).parse().unwrap()
        }),
        prop::sample::subsequence(ElementKind::ALL.to_vec(), 1..4)
            .prop_map(|elements| ScenarioParams::Syntax { elements }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_partitions_the_data(
        params in params(),
        mask in prop_oneof![Just(1.0), Just(0.5), 0.01f64..1.0],
        seed in any::<u64>(),
        filter_valid in any::<bool>(),
    ) {
        let corpus = corpus();
        let spec = ScenarioSpec::new("p", params).with_mask_fraction(mask).with_seed(seed);
        let splitter = ScenarioSplitter::new(corpus).with_options(SplitOptions { strict_lex: false, filter_valid });
        let m = match splitter.build(&spec, None) {
            Ok(m) => m,
            Err(Error::UnevaluableScenario { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let predicate = splitter.predicate(&spec, None).unwrap();
        let ids = |p: Partition| -> BTreeSet<String> {
            corpus.iter_partition(p).map(|(_, s)| s.id.clone()).collect()
        };
        let set = |v: &[String]| -> BTreeSet<String> { v.iter().cloned().collect() };

        let train: BTreeSet<String> = set(&m.train_ids);
        let masked = set(&m.masked_train_ids);
        prop_assert!(train.is_disjoint(&masked));
        prop_assert_eq!(&train | &masked, ids(Partition::Train));
        prop_assert_eq!(masked.len(), mask_count(mask, m.stats.n_property_train));
        prop_assert!(masked.iter().all(|id| predicate.matches(corpus, id)));
        prop_assert!(m.kept_property_train_ids.iter().all(|id| train.contains(id) && predicate.matches(corpus, id)));
        prop_assert_eq!(m.kept_property_train_ids.len() + masked.len(), m.stats.n_property_train);
        prop_assert!(!m.ood_test_ids.is_empty());
        prop_assert!(m.ood_test_ids.iter().all(|id| predicate.matches(corpus, id)
            && corpus.get(id).unwrap().partition == Partition::Test));
        prop_assert_eq!(&set(&m.valid_ids) | &set(&m.masked_valid_ids), ids(Partition::Valid));
        if !filter_valid {
            prop_assert!(m.masked_valid_ids.is_empty());
        }
        // Test and valid samples without the property never leak into the OOD set.
        let n_test_property = corpus
            .iter_partition(Partition::Test)
            .filter(|(_, s)| predicate.matches(corpus, &s.id))
            .count();
        prop_assert_eq!(m.ood_test_ids.len(), n_test_property);
    }

    #[test]
    fn masking_only_grows_with_the_fraction(seed in any::<u64>(), a in 0.05f64..1.0, b in 0.05f64..1.0) {
        let corpus = corpus();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let spec = |m: f64| ScenarioSpec::new(
            "m",
            ScenarioParams::Syntax { elements: vec![ElementKind::Else, ElementKind::True] },
        )
        .with_mask_fraction(m)
        .with_seed(seed);
        let splitter = ScenarioSplitter::new(corpus);
        let small: BTreeSet<String> = splitter.build(&spec(lo), None).unwrap().masked_train_ids.into_iter().collect();
        let large: BTreeSet<String> = splitter.build(&spec(hi), None).unwrap().masked_train_ids.into_iter().collect();
        prop_assert!(small.is_subset(&large));
    }
}

#[test]
fn syntax_predicate_is_element_presence() {
    let corpus = corpus();
    let splitter = ScenarioSplitter::new(corpus);
    for kind in ElementKind::ALL {
        let spec = ScenarioSpec::new("k", ScenarioParams::Syntax { elements: vec![kind] });
        let p = splitter.predicate(&spec, None).unwrap();
        for s in corpus.samples() {
            assert_eq!(p.matches(corpus, &s.id), elements_of(&s.target).unwrap().contains(kind));
        }
    }
}
