//! Line-oriented text formats: `key=value` configs, JSONL records and
//! tab-separated predictions.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

fn line_error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line { line, message: message.into() }
}

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// ignored; later duplicates are kept so callers can apply them in order.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| line_error(i + 1, "expected key=value"))?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(line_error(i + 1, format!("bad key `{key}`")));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

pub fn format_key_values<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> String {
    pairs.iter().map(|(k, v)| format!("{}={}\n", k.as_ref(), v.as_ref())).collect()
}

/// Records from JSON lines, plus `(line number, error)` for every
/// malformed line. Blank lines are skipped silently.
pub fn read_jsonl<T: DeserializeOwned>(text: &str) -> (Vec<T>, Vec<(usize, String)>) {
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(v) => ok.push(v),
            Err(e) => bad.push((i + 1, e.to_string())),
        }
    }
    (ok, bad)
}

pub fn write_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// `id<TAB>space separated tokens` per line.
pub fn format_predictions(preds: &[(u64, Vec<String>)]) -> String {
    preds.iter().map(|(id, toks)| format!("{id}\t{}\n", toks.join(" "))).collect()
}

pub fn parse_predictions(text: &str) -> Result<Vec<(u64, Vec<String>)>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (id, toks) = line.split_once('\t').ok_or_else(|| line_error(i + 1, "expected id<TAB>tokens"))?;
        let id = id.parse().map_err(|_| line_error(i + 1, format!("bad id `{id}`")))?;
        out.push((id, toks.split_whitespace().map(String::from).collect()));
    }
    Ok(out)
}
