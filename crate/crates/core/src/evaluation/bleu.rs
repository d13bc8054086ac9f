//! Corpus BLEU-4.
//!
//! Modified n-gram precisions are pooled over the whole corpus. The unigram
//! precision is unsmoothed; for n >= 2 one is added to both the matched and
//! the total count. The score is the geometric mean of the four precisions
//! times the brevity penalty `min(1, exp(1 - r/c))`, where `r` and `c` are the
//! pooled reference and candidate lengths (`c = 0` scores 0).

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Pooled n-gram statistics; additive across samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub candidate_len: u64,
    pub reference_len: u64,
}

impl std::ops::AddAssign for BleuStats {
    fn add_assign(&mut self, o: Self) {
        for n in 0..MAX_ORDER {
            self.matches[n] += o.matches[n];
            self.totals[n] += o.totals[n];
        }
        self.candidate_len += o.candidate_len;
        self.reference_len += o.reference_len;
    }
}

fn ngram_counts<'t, 'a>(tokens: &'t [&'a str], n: usize) -> HashMap<&'t [&'a str], u64> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts.entry(w).or_insert(0) += 1;
    }
    counts
}

impl BleuStats {
    pub fn of_pair(candidate: &[&str], reference: &[&str]) -> Self {
        let mut s = BleuStats {
            candidate_len: candidate.len() as u64,
            reference_len: reference.len() as u64,
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let cand = ngram_counts(candidate, n);
            let refs = ngram_counts(reference, n);
            s.totals[n - 1] = candidate.len().saturating_sub(n - 1) as u64;
            s.matches[n - 1] = cand
                .iter()
                .map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0)))
                .sum();
        }
        s
    }

    pub fn score(&self) -> f64 {
        if self.candidate_len == 0 || self.matches[0] == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for n in 0..MAX_ORDER {
            let (m, t) = if n == 0 {
                (self.matches[0] as f64, self.totals[0] as f64)
            } else {
                (self.matches[n] as f64 + 1.0, self.totals[n] as f64 + 1.0)
            };
            log_sum += (m / t).ln();
        }
        let (c, r) = (self.candidate_len as f64, self.reference_len as f64);
        let bp = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
        (bp * (log_sum / MAX_ORDER as f64).exp()).min(1.0)
    }
}

/// BLEU-4 of tokenized candidates against aligned references.
pub fn corpus_bleu<S: AsRef<str>>(candidates: &[Vec<S>], references: &[Vec<S>]) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("BLEU needs at least one prediction".into()));
    }
    if candidates.len() != references.len() {
        return Err(Error::InvalidArgument(format!(
            "{} predictions but {} references",
            candidates.len(),
            references.len()
        )));
    }
    let mut stats = BleuStats::default();
    for (c, r) in candidates.iter().zip(references) {
        let c: Vec<&str> = c.iter().map(AsRef::as_ref).collect();
        let r: Vec<&str> = r.iter().map(AsRef::as_ref).collect();
        stats += BleuStats::of_pair(&c, &r);
    }
    Ok(stats.score())
}
