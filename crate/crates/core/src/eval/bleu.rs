use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{candidates} candidates but {references} references")]
    LengthMismatch { candidates: usize, references: usize },
}

/// Corpus BLEU with its components. All scores are on a 0-100 scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuReport {
    /// Composite BLEU: brevity penalty times the geometric mean of p_1..p_N.
    pub bleu: f64,
    /// `bleu_n[i]` is BP * p_{i+1}, the brevity-penalized individual n-gram
    /// precision, not the cumulative BLEU-n.
    pub bleu_n: Vec<f64>,
    pub brevity_penalty: f64,
    /// Modified n-gram precisions in [0, 1].
    pub precisions: Vec<f64>,
    pub candidate_len: usize,
    pub reference_len: usize,
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    counts
}

/// (clipped matches, candidate n-gram total) for one pair.
fn clipped<S: AsRef<str>, T: AsRef<str>>(cand: &[S], reference: &[T], n: usize) -> (usize, usize) {
    let c = ngram_counts(cand, n);
    let r = ngram_counts(reference, n);
    let matched = c.iter().map(|(g, &k)| k.min(r.get(g).copied().unwrap_or(0))).sum();
    (matched, cand.len().saturating_sub(n - 1))
}

fn brevity_penalty(cand_len: usize, ref_len: usize) -> f64 {
    if cand_len == 0 {
        0.0
    } else if cand_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    }
}

fn combine(precisions: &[f64], bp: f64) -> f64 {
    if precisions.contains(&0.0) {
        return 0.0;
    }
    let w = 1.0 / precisions.len() as f64;
    let log_mean: f64 = precisions.iter().map(|p| w * p.ln()).sum();
    100.0 * bp * log_mean.exp()
}

/// Corpus-level BLEU with uniform weights over 1..=`max_n`-grams.
///
/// Clipped matches and candidate n-gram counts are summed over all pairs
/// before dividing; an order with no candidate n-grams has precision 0.
pub fn corpus_bleu<S, T>(candidates: &[Vec<S>], references: &[Vec<T>], max_n: usize) -> Result<BleuReport, EvalError>
where
    S: AsRef<str>,
    T: AsRef<str>,
{
    if candidates.len() != references.len() {
        return Err(EvalError::LengthMismatch { candidates: candidates.len(), references: references.len() });
    }
    let mut matches = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let mut cand_len = 0;
    let mut ref_len = 0;
    for (c, r) in candidates.iter().zip(references) {
        cand_len += c.len();
        ref_len += r.len();
        for n in 1..=max_n {
            let (m, t) = clipped(c, r, n);
            matches[n - 1] += m;
            totals[n - 1] += t;
        }
    }
    let precisions: Vec<f64> =
        matches.iter().zip(&totals).map(|(&m, &t)| if t == 0 { 0.0 } else { m as f64 / t as f64 }).collect();
    let bp = brevity_penalty(cand_len, ref_len);
    Ok(BleuReport {
        bleu: combine(&precisions, bp),
        bleu_n: precisions.iter().map(|p| 100.0 * bp * p).collect(),
        brevity_penalty: bp,
        precisions,
        candidate_len: cand_len,
        reference_len: ref_len,
    })
}

/// Sentence BLEU-4 with add-one smoothing of every precision above unigrams.
pub fn sentence_bleu<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T]) -> f64 {
    const MAX_N: usize = 4;
    let precisions: Vec<f64> = (1..=MAX_N)
        .map(|n| {
            let (m, t) = clipped(candidate, reference, n);
            if n == 1 {
                if t == 0 {
                    0.0
                } else {
                    m as f64 / t as f64
                }
            } else {
                (m as f64 + 1.0) / (t as f64 + 1.0)
            }
        })
        .collect();
    combine(&precisions, brevity_penalty(candidate.len(), reference.len()))
}
