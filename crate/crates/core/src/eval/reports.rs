use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::bleu::{sentence_bleu, EvalError};

pub const DEFAULT_THRESHOLDS: [u64; 4] = [10, 20, 50, 100];

/// One row of a per-length breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthBucket {
    /// Smallest length in the bucket (a multiple of the bucket width).
    pub length: usize,
    pub mean_bleu: f64,
    pub count: usize,
}

/// Per-length mean sentence BLEU, keyed by the code and by the reference
/// comment length of each sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthReport {
    pub by_code_length: Vec<LengthBucket>,
    pub by_comment_length: Vec<LengthBucket>,
}

fn check_aligned(lens: &[usize]) -> Result<(), EvalError> {
    match lens.iter().find(|&&l| l != lens[0]) {
        Some(&other) => Err(EvalError::LengthMismatch { candidates: lens[0], references: other }),
        None => Ok(()),
    }
}

fn bucketize(scores: &[f64], lengths: &[usize], width: usize) -> Vec<LengthBucket> {
    let width = width.max(1);
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (&s, &len) in scores.iter().zip(lengths) {
        let e = acc.entry(len / width * width).or_default();
        e.0 += s;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(length, (sum, count))| LengthBucket { length, mean_bleu: sum / count as f64, count })
        .collect()
}

pub fn length_bucket_report<S: AsRef<str>, T: AsRef<str>>(
    predictions: &[Vec<S>],
    references: &[Vec<T>],
    code_lengths: &[usize],
    comment_lengths: &[usize],
    bucket_width: usize,
) -> Result<LengthReport, EvalError> {
    check_aligned(&[predictions.len(), references.len(), code_lengths.len(), comment_lengths.len()])?;
    let scores: Vec<f64> = predictions.iter().zip(references).map(|(p, r)| sentence_bleu(p, r)).collect();
    Ok(LengthReport {
        by_code_length: bucketize(&scores, code_lengths, bucket_width),
        by_comment_length: bucketize(&scores, comment_lengths, bucket_width),
    })
}

/// Correctly generated rare tokens for one frequency threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowFreqRow {
    pub threshold: u64,
    /// Occurrences shared by prediction and reference (multiset
    /// intersection per pair) whose training frequency is below the threshold.
    pub correct: usize,
    /// Reference occurrences below the threshold.
    pub reference_total: usize,
}

/// A token counts as rare for threshold `t` when its training frequency is
/// strictly less than `t`; unseen tokens have frequency 0.
pub fn low_freq_report<S: AsRef<str>, T: AsRef<str>>(
    predictions: &[Vec<S>],
    references: &[Vec<T>],
    train_freq: &HashMap<String, u64>,
    thresholds: &[u64],
) -> Result<Vec<LowFreqRow>, EvalError> {
    check_aligned(&[predictions.len(), references.len()])?;
    let freq = |t: &str| train_freq.get(t).copied().unwrap_or(0);
    let mut rows: Vec<LowFreqRow> =
        thresholds.iter().map(|&threshold| LowFreqRow { threshold, correct: 0, reference_total: 0 }).collect();
    for (pred, reference) in predictions.iter().zip(references) {
        let mut ref_counts: HashMap<&str, usize> = HashMap::new();
        for t in reference {
            *ref_counts.entry(t.as_ref()).or_default() += 1;
        }
        let mut pred_counts: HashMap<&str, usize> = HashMap::new();
        for t in pred {
            *pred_counts.entry(t.as_ref()).or_default() += 1;
        }
        for (tok, &rc) in &ref_counts {
            let f = freq(tok);
            let shared = rc.min(pred_counts.get(tok).copied().unwrap_or(0));
            for row in rows.iter_mut().filter(|r| f < r.threshold) {
                row.reference_total += rc;
                row.correct += shared;
            }
        }
    }
    Ok(rows)
}

/// Token frequencies over a set of comments.
pub fn token_frequencies<S: AsRef<str>>(comments: &[Vec<S>]) -> HashMap<String, u64> {
    let mut out = HashMap::new();
    for c in comments {
        for t in c {
            *out.entry(t.as_ref().to_string()).or_default() += 1;
        }
    }
    out
}
