//! Binary index file.
//!
//! Layout (little-endian):
//!
//! ```text
//! magic "EXIDX\0" | version u16 | k1 f64 | b f64
//! doc_count u32 | doc_count x (id u64, len u32)        ids strictly ascending
//! term_count u32 | term_count x (term str, n u32, n x (doc u32, tf u32))
//! ```
//!
//! Strings are `u32` length + UTF-8. Terms are strictly ascending, postings
//! strictly ascending by internal doc number, and each document's term
//! frequencies must sum to its stored length.

use std::collections::BTreeMap;

use super::index::{Bm25Params, Index, Posting};
use super::RetrievalError;
use crate::binio::{DecodeError, Reader, Writer};

pub const INDEX_MAGIC: &[u8; 6] = b"EXIDX\0";
pub const INDEX_VERSION: u16 = 1;

pub fn encode_index(index: &Index) -> Vec<u8> {
    let mut w = Writer::default();
    w.bytes(INDEX_MAGIC);
    w.u16(INDEX_VERSION);
    w.f64(index.params.k1);
    w.f64(index.params.b);
    w.u32(index.doc_ids.len() as u32);
    for (id, len) in index.doc_ids.iter().zip(&index.doc_len) {
        w.u64(*id);
        w.u32(*len);
    }
    w.u32(index.postings.len() as u32);
    for (term, list) in &index.postings {
        w.string(term);
        w.u32(list.len() as u32);
        for p in list {
            w.u32(p.doc);
            w.u32(p.tf);
        }
    }
    w.buf
}

fn invalid(msg: impl Into<String>) -> RetrievalError {
    RetrievalError::Decode(DecodeError::Invalid(msg.into()))
}

pub fn decode_index(bytes: &[u8]) -> Result<Index, RetrievalError> {
    let mut r = Reader::new(bytes);
    r.magic(INDEX_MAGIC)?;
    let version = r.u16()?;
    if version != INDEX_VERSION {
        return Err(DecodeError::Version(version).into());
    }
    let k1 = r.f64()?;
    let b = r.f64()?;
    if !(k1.is_finite() && k1 >= 0.0 && (0.0..=1.0).contains(&b)) {
        return Err(invalid("BM25 parameters out of range"));
    }

    let n = r.count(12)?;
    if n == 0 {
        return Err(RetrievalError::EmptyCorpus);
    }
    let mut doc_ids = Vec::with_capacity(n);
    let mut doc_len = Vec::with_capacity(n);
    for _ in 0..n {
        let id = r.u64()?;
        if doc_ids.last().is_some_and(|&prev| prev >= id) {
            return Err(invalid("document ids not strictly ascending"));
        }
        doc_ids.push(id);
        doc_len.push(r.u32()?);
    }

    let term_count = r.count(8)?;
    let mut postings = BTreeMap::new();
    let mut tf_sums = vec![0u64; n];
    let mut prev_term: Option<String> = None;
    for _ in 0..term_count {
        let term = r.string()?;
        if prev_term.as_ref().is_some_and(|p| *p >= term) {
            return Err(invalid("terms not strictly ascending"));
        }
        let len = r.count(8)?;
        if len == 0 {
            return Err(invalid(format!("empty postings for `{term}`")));
        }
        let mut list = Vec::with_capacity(len);
        for _ in 0..len {
            let doc = r.u32()?;
            let tf = r.u32()?;
            if doc as usize >= n || tf == 0 {
                return Err(invalid("posting out of range"));
            }
            if list.last().is_some_and(|p: &Posting| p.doc >= doc) {
                return Err(invalid("postings not strictly ascending"));
            }
            tf_sums[doc as usize] += u64::from(tf);
            list.push(Posting { doc, tf });
        }
        prev_term = Some(term.clone());
        postings.insert(term, list);
    }
    if !r.is_empty() {
        return Err(invalid("trailing bytes after index"));
    }
    if tf_sums.iter().zip(&doc_len).any(|(&sum, &len)| sum != u64::from(len)) {
        return Err(invalid("term frequencies disagree with document lengths"));
    }
    Ok(Index::from_parts(doc_ids, doc_len, postings, Bm25Params { k1, b }))
}
