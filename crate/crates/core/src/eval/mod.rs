//! BLEU scoring and breakdown reports.

mod bleu;
mod reports;

pub use bleu::{corpus_bleu, sentence_bleu, BleuReport, EvalError};
pub use reports::{
    length_bucket_report, low_freq_report, token_frequencies, LengthBucket, LengthReport, LowFreqRow,
    DEFAULT_THRESHOLDS,
};

/// Renders a report as `key value` lines with fixed key names.
pub fn format_bleu(report: &BleuReport) -> String {
    let mut out = format!("bleu {:.4}\n", report.bleu);
    for (i, b) in report.bleu_n.iter().enumerate() {
        out.push_str(&format!("bleu{} {:.4}\n", i + 1, b));
    }
    out.push_str(&format!("brevity_penalty {:.6}\n", report.brevity_penalty));
    for (i, p) in report.precisions.iter().enumerate() {
        out.push_str(&format!("p{} {:.6}\n", i + 1, p));
    }
    out.push_str(&format!("candidate_length {}\n", report.candidate_len));
    out.push_str(&format!("reference_length {}\n", report.reference_len));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format_keys() {
        let r = corpus_bleu(&[vec!["a", "b"]], &[vec!["a", "b"]], 4).unwrap();
        let text = format_bleu(&r);
        let keys: Vec<&str> = text.lines().map(|l| l.split(' ').next().unwrap()).collect();
        assert_eq!(
            keys,
            [
                "bleu",
                "bleu1",
                "bleu2",
                "bleu3",
                "bleu4",
                "brevity_penalty",
                "p1",
                "p2",
                "p3",
                "p4",
                "candidate_length",
                "reference_length"
            ]
        );
    }
}
