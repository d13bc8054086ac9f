mod common;

use codeood_core::evaluation::corpus_bleu;
use codeood_core::lexer::token_texts;

fn split(pairs: &[common::BleuPair]) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    (
        pairs.iter().map(|p| p.prediction.clone()).collect(),
        pairs.iter().map(|p| p.reference.clone()).collect(),
    )
}

#[test]
fn corpus_score_matches_frozen_oracle() {
    let f = common::bleu_fixture();
    assert_eq!(f.pairs.len(), 50);
    let (c, r) = split(&f.pairs);
    let ours = corpus_bleu(&c, &r).unwrap();
    assert!((ours - f.corpus_bleu).abs() < 1e-6, "{ours} vs {} ({})", f.corpus_bleu, f.oracle);
    let ours5 = corpus_bleu(&c[..5], &r[..5]).unwrap();
    assert!((ours5 - f.first5_corpus_bleu).abs() < 1e-6, "{ours5} vs {}", f.first5_corpus_bleu);
}

#[test]
fn single_pair_scores_match_frozen_oracle() {
    let f = common::bleu_fixture();
    for (i, p) in f.pairs.iter().enumerate() {
        let ours = corpus_bleu(&[p.prediction.clone()], &[p.reference.clone()]).unwrap();
        assert!((ours - p.sentence_bleu).abs() < 1e-6, "pair {i}: {ours} vs {}", p.sentence_bleu);
    }
}

#[test]
fn corpus_score_matches_naive_recount() {
    let f = common::bleu_fixture();
    let (c, r) = split(&f.pairs);
    let pairs: Vec<_> = c.iter().cloned().zip(r.iter().cloned()).collect();
    let naive = common::naive_bleu(&pairs);
    let ours = corpus_bleu(&c, &r).unwrap();
    assert!((ours - naive).abs() < 1e-12, "{ours} vs {naive}");
    for pair in pairs.chunks(7) {
        let (c, r): (Vec<_>, Vec<_>) = pair.iter().cloned().unzip();
        assert!((corpus_bleu(&c, &r).unwrap() - common::naive_bleu(pair)).abs() < 1e-12);
    }
}

#[test]
fn fixture_tokens_are_lexer_tokens() {
    let f = common::bleu_fixture();
    for p in &f.pairs {
        let code = p.reference.join(" ");
        assert_eq!(token_texts(&code).unwrap(), p.reference, "{code}");
    }
}

#[test]
fn identical_and_empty_predictions() {
    let f = common::bleu_fixture();
    let (_, r) = split(&f.pairs);
    assert_eq!(corpus_bleu(&r, &r).unwrap(), 1.0);
    let empty: Vec<Vec<String>> = vec![Vec::new(); r.len()];
    assert_eq!(corpus_bleu(&empty, &r).unwrap(), 0.0);
}
