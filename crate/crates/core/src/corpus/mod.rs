//! Corpus ingestion: comment extraction, filtering, deduplication and
//! project-wise splitting.

mod normalize;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::{self, sbt, sbt_ao};

pub use normalize::{normalize_text, normalize_tokens};

/// One function/comment record as found in the raw input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub source_text: String,
    #[serde(default)]
    pub doc_text: String,
    pub project_id: String,
    /// Externally computed SBT sequence; when present the parser is bypassed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sbt_tokens: Option<Vec<String>>,
}

/// A preprocessed function with its comment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: u64,
    pub project_id: String,
    pub code_tokens: Vec<String>,
    pub sbt_tokens: Vec<String>,
    pub comment_tokens: Vec<String>,
}

/// Which representation feeds the code-token stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusMode {
    /// Normalized source tokens.
    #[default]
    Standard,
    /// Only the value-erased AST traversal is available; it replaces both
    /// the code tokens and the SBT tokens.
    Challenge,
}

impl std::str::FromStr for CorpusMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Self::Standard),
            "challenge" => Ok(Self::Challenge),
            other => Err(format!("unknown mode `{other}` (expected standard|challenge)")),
        }
    }
}

impl std::fmt::Display for CorpusMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::Challenge => "challenge",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CorpusError {
    #[error("split fractions must be positive and sum to 1 (got {0}, {1}, {2})")]
    BadFractions(f64, f64, f64),
}

/// Why a raw record did not become a sample.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkipReason {
    #[error("empty source text")]
    EmptySource,
    #[error("non-ASCII content")]
    NonAscii,
    #[error("no usable comment")]
    NoComment,
    #[error("auto-generated comment")]
    AutoGenerated,
    #[error("source does not lex: {0}")]
    Lex(String),
    #[error("source does not parse: {0}")]
    Parse(String),
    #[error("no alphabetic code tokens")]
    EmptyCode,
}

/// Extracts the summary sentence of a documentation block.
///
/// The first sentence ends at `.`, `!` or `?` followed by whitespace (or the
/// end of text), or at a blank line. Without any terminator the first
/// non-empty line is used. Returns `None` when nothing alphabetic remains.
pub fn extract_comment(doc_text: &str) -> Option<Vec<String>> {
    let body = strip_doc_markup(doc_text);
    let summary = match first_sentence_end(&body) {
        Some(end) => body[..end].to_string(),
        None => body.lines().find(|l| !l.trim().is_empty()).unwrap_or("").to_string(),
    };
    let tokens = normalize_text(&summary);
    (!tokens.is_empty()).then_some(tokens)
}

fn first_sentence_end(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'.' | b'!' | b'?' => {
                if bytes.get(i + 1).map_or(true, |n| n.is_ascii_whitespace()) {
                    return Some(i);
                }
            }
            b'\n' => {
                let rest = &text[i + 1..];
                let next_line = rest.split('\n').next().unwrap_or("");
                if next_line.trim().is_empty() && !text[..i].trim().is_empty() {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Removes comment delimiters, leading `*`, block tags, HTML tags and
/// inline `{@tag ...}` wrappers.
fn strip_doc_markup(doc: &str) -> String {
    let mut lines = Vec::new();
    for line in doc.lines() {
        let mut l = line.trim();
        l = l.strip_prefix("/**").unwrap_or(l);
        l = l.strip_prefix("/*").unwrap_or(l);
        l = l.strip_suffix("*/").unwrap_or(l);
        l = l.trim_start().trim_start_matches('*').trim();
        if l.starts_with('@') {
            break;
        }
        lines.push(l.to_string());
    }
    let joined = lines.join("\n");

    let mut out = String::with_capacity(joined.len());
    let mut chars = joined.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '<' => {
                // HTML tag: drop through the closing '>'; a lone '<' survives.
                let rest: String = chars.clone().take_while(|&ch| ch != '\n').collect();
                if let Some(close) = rest.find('>') {
                    for _ in 0..rest[..=close].chars().count() {
                        chars.next();
                    }
                    out.push(' ');
                } else {
                    out.push(c);
                }
            }
            '{' if chars.peek() == Some(&'@') => {
                // `{@code foo}` keeps `foo`
                while let Some(&n) = chars.peek() {
                    chars.next();
                    if n.is_whitespace() || n == '}' {
                        break;
                    }
                }
            }
            '}' => out.push(' '),
            _ => out.push(c),
        }
    }
    out
}

fn is_auto_generated(comment: &[String]) -> bool {
    match comment {
        [first, ..] if first == "autogenerated" => true,
        [a, b, ..] => a == "auto" && b == "generated",
        _ => false,
    }
}

/// A sample before id assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtoSample {
    pub project_id: String,
    pub code_tokens: Vec<String>,
    pub sbt_tokens: Vec<String>,
    pub comment_tokens: Vec<String>,
}

/// Applies extraction, filtering and parsing to one raw record.
pub fn preprocess_record(rec: &RawRecord, mode: CorpusMode) -> Result<ProtoSample, SkipReason> {
    if rec.source_text.trim().is_empty() {
        return Err(SkipReason::EmptySource);
    }
    if !rec.source_text.is_ascii() || !rec.doc_text.is_ascii() {
        return Err(SkipReason::NonAscii);
    }
    let comment = extract_comment(&rec.doc_text).ok_or(SkipReason::NoComment)?;
    if is_auto_generated(&comment) {
        return Err(SkipReason::AutoGenerated);
    }
    let raw_tokens = parser::tokenize_source(&rec.source_text).map_err(|e| SkipReason::Lex(e.to_string()))?;

    let (full_sbt, ao_sbt) = match &rec.sbt_tokens {
        Some(given) if !given.is_empty() => (given.clone(), parser::erase_sbt_values(given)),
        _ => {
            let ast = parser::parse_method(&rec.source_text).map_err(|e| SkipReason::Parse(e.to_string()))?;
            (sbt(&ast), sbt_ao(&ast))
        }
    };

    let (code_tokens, sbt_tokens) = match mode {
        CorpusMode::Standard => {
            let texts: Vec<&str> = raw_tokens.iter().map(|t| t.text.as_str()).collect();
            (normalize_tokens(&texts), full_sbt)
        }
        CorpusMode::Challenge => (ao_sbt.clone(), ao_sbt),
    };
    if code_tokens.is_empty() {
        return Err(SkipReason::EmptyCode);
    }
    Ok(ProtoSample { project_id: rec.project_id.clone(), code_tokens, sbt_tokens, comment_tokens: comment })
}

/// Keeps the first occurrence of every distinct (code, comment) pair.
pub fn deduplicate<S: DedupKey>(samples: Vec<S>) -> Vec<S> {
    let mut seen: HashSet<(Vec<String>, Vec<String>)> = HashSet::new();
    samples.into_iter().filter(|s| seen.insert((s.code().to_vec(), s.comment().to_vec()))).collect()
}

/// Access to the fields that define a duplicate.
pub trait DedupKey {
    fn code(&self) -> &[String];
    fn comment(&self) -> &[String];
}

impl DedupKey for Sample {
    fn code(&self) -> &[String] {
        &self.code_tokens
    }
    fn comment(&self) -> &[String] {
        &self.comment_tokens
    }
}

impl DedupKey for ProtoSample {
    fn code(&self) -> &[String] {
        &self.code_tokens
    }
    fn comment(&self) -> &[String] {
        &self.comment_tokens
    }
}

/// Numbers samples in order, starting at zero.
pub fn assign_ids(protos: Vec<ProtoSample>) -> Vec<Sample> {
    protos
        .into_iter()
        .enumerate()
        .map(|(i, p)| Sample {
            id: i as u64,
            project_id: p.project_id,
            code_tokens: p.code_tokens,
            sbt_tokens: p.sbt_tokens,
            comment_tokens: p.comment_tokens,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub valid_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, valid: f64, test: f64, seed: u64) -> Result<Self, CorpusError> {
        let ok = [train, valid, test].iter().all(|f| f.is_finite() && *f > 0.0)
            && ((train + valid + test) - 1.0).abs() < 1e-9;
        if !ok {
            return Err(CorpusError::BadFractions(train, valid, test));
        }
        Ok(Self { train_fraction: train, valid_fraction: valid, test_fraction: test, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl SplitSpec {
    /// Assigns a project to a split; a pure function of the id and seed.
    pub fn assign(&self, project_id: &str) -> Split {
        let u = unit_hash(project_id, self.seed);
        if u < self.train_fraction {
            Split::Train
        } else if u < self.train_fraction + self.valid_fraction {
            Split::Valid
        } else {
            Split::Test
        }
    }
}

/// FNV-1a over seed and project id, finalized with splitmix64, mapped to [0, 1).
fn unit_hash(project_id: &str, seed: u64) -> f64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in seed.to_le_bytes().iter().chain(project_id.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(PRIME);
    }
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^= h >> 31;
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Train, validation and test partitions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Splits {
    pub train: Vec<Sample>,
    pub valid: Vec<Sample>,
    pub test: Vec<Sample>,
}

pub fn split_by_project(samples: Vec<Sample>, spec: &SplitSpec) -> Splits {
    let mut splits = Splits::default();
    for s in samples {
        match spec.assign(&s.project_id) {
            Split::Train => splits.train.push(s),
            Split::Valid => splits.valid.push(s),
            Split::Test => splits.test.push(s),
        }
    }
    splits
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SplitStats {
    pub count: usize,
    pub avg_comment_tokens: f64,
    pub avg_code_tokens: f64,
    pub avg_sbt_tokens: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CorpusStats {
    pub train: SplitStats,
    pub valid: SplitStats,
    pub test: SplitStats,
}

pub fn split_stats(samples: &[Sample]) -> SplitStats {
    if samples.is_empty() {
        return SplitStats::default();
    }
    let n = samples.len() as f64;
    let mean = |f: fn(&Sample) -> usize| samples.iter().map(f).sum::<usize>() as f64 / n;
    SplitStats {
        count: samples.len(),
        avg_comment_tokens: mean(|s| s.comment_tokens.len()),
        avg_code_tokens: mean(|s| s.code_tokens.len()),
        avg_sbt_tokens: mean(|s| s.sbt_tokens.len()),
    }
}

pub fn stats(splits: &Splits) -> CorpusStats {
    CorpusStats {
        train: split_stats(&splits.train),
        valid: split_stats(&splits.valid),
        test: split_stats(&splits.test),
    }
}
