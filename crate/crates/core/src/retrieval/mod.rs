//! BM25 retrieval of exemplar comments.

mod index;
mod persist;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binio::DecodeError;
use crate::corpus::Sample;

pub use index::{Bm25Params, Index, Posting, RetrievalResult};
pub use persist::{decode_index, encode_index, INDEX_MAGIC, INDEX_VERSION};

/// Exemplar used when retrieval finds nothing.
pub const NONE_TOKEN: &str = "<none>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RetrievalError {
    #[error("cannot index an empty corpus")]
    EmptyCorpus,
    #[error("document id {0} appears more than once")]
    DuplicateDoc(u64),
    #[error("document id {0} is not in the index")]
    UnknownDoc(u64),
    #[error("corrupt index: {0}")]
    Decode(#[from] DecodeError),
}

/// A query sample paired with the comment of its most similar neighbor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExemplarPair {
    pub query_id: u64,
    /// `None` when no indexed document shares a term with the query.
    pub similar_id: Option<u64>,
    pub score: f64,
    pub exemplar_tokens: Vec<String>,
}

impl ExemplarPair {
    pub fn is_empty(&self) -> bool {
        self.similar_id.is_none()
    }
}

pub fn empty_exemplar() -> Vec<String> {
    vec![NONE_TOKEN.to_string()]
}

/// Indexes the code-token field (the value-erased traversal in challenge
/// corpora, since preprocessing stores it there).
pub fn build_index(samples: &[Sample]) -> Result<Index, RetrievalError> {
    Index::build(samples.iter().map(|s| (s.id, s.code_tokens.as_slice())))
}

/// Pairs every query with the top-ranked indexed sample.
///
/// With `exclude_self` the query's own id is skipped, which is how training
/// queries get the runner-up rather than themselves.
pub fn pair_exemplars(queries: &[Sample], index: &Index, corpus: &[Sample], exclude_self: bool) -> Vec<ExemplarPair> {
    let by_id: HashMap<u64, &Sample> = corpus.iter().map(|s| (s.id, s)).collect();
    queries
        .iter()
        .map(|q| {
            let exclude = exclude_self.then_some(q.id);
            let top = index.retrieve(&q.code_tokens, 1, exclude).into_iter().next().filter(|hit| hit.score > 0.0);
            match top.and_then(|hit| by_id.get(&hit.doc_id).map(|s| (hit, s))) {
                Some((hit, similar)) => ExemplarPair {
                    query_id: q.id,
                    similar_id: Some(hit.doc_id),
                    score: hit.score,
                    exemplar_tokens: similar.comment_tokens.clone(),
                },
                None => {
                    ExemplarPair { query_id: q.id, similar_id: None, score: 0.0, exemplar_tokens: empty_exemplar() }
                }
            }
        })
        .collect()
}
