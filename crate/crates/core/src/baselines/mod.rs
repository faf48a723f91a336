//! Information-retrieval comment generators: each returns the comment of
//! a training sample chosen by code similarity.

mod lsi;
mod nngen;
mod vsm;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use lsi::{truncated_basis, LsiIndex, DEFAULT_LSI_DIM};
pub use nngen::{NnGen, DEFAULT_NEIGHBORS};
pub use vsm::{SparseVec, TermSpace, VsmIndex};

use crate::corpus::Sample;
use crate::retrieval::{build_index, empty_exemplar, pair_exemplars, RetrievalError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// The BM25 exemplar itself.
    Retrieve,
    Vsm,
    Lsi,
    NnGen,
}

impl FromStr for Baseline {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "retrieve" => Ok(Self::Retrieve),
            "vsm" => Ok(Self::Vsm),
            "lsi" => Ok(Self::Lsi),
            "nngen" => Ok(Self::NnGen),
            _ => Err(format!("unknown baseline `{s}`")),
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Retrieve => "retrieve",
            Self::Vsm => "vsm",
            Self::Lsi => "lsi",
            Self::NnGen => "nngen",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineOptions {
    pub lsi_dim: usize,
    pub neighbors: usize,
    pub seed: u64,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        Self { lsi_dim: DEFAULT_LSI_DIM, neighbors: DEFAULT_NEIGHBORS, seed: 0 }
    }
}

type Chooser = Box<dyn Fn(&Sample) -> Option<u64>>;

/// One predicted comment per query, in query order. `exclude_self` keeps a
/// query that is itself in `train` from choosing itself.
pub fn predict(
    kind: Baseline,
    train: &[Sample],
    queries: &[Sample],
    exclude_self: bool,
    opts: &BaselineOptions,
) -> Result<Vec<(u64, Vec<String>)>, RetrievalError> {
    if kind == Baseline::Retrieve {
        let index = build_index(train)?;
        return Ok(pair_exemplars(queries, &index, train, exclude_self)
            .into_iter()
            .map(|p| (p.query_id, p.exemplar_tokens))
            .collect());
    }
    let docs: Vec<(u64, &[String])> = train.iter().map(|s| (s.id, s.code_tokens.as_slice())).collect();
    let comments: HashMap<u64, &Vec<String>> = train.iter().map(|s| (s.id, &s.comment_tokens)).collect();
    let chooser: Chooser = match kind {
        Baseline::Vsm => {
            let vsm = VsmIndex::build(&docs);
            Box::new(move |q| vsm.nearest(&q.code_tokens, exclude_self.then_some(q.id)).map(|h| h.0))
        }
        Baseline::Lsi => {
            let lsi = LsiIndex::fit(&VsmIndex::build(&docs), opts.lsi_dim, opts.seed);
            Box::new(move |q| lsi.nearest(&q.code_tokens, exclude_self.then_some(q.id)).map(|h| h.0))
        }
        Baseline::NnGen => {
            let nn = NnGen::build(&docs);
            let k = opts.neighbors;
            Box::new(move |q| nn.select(&q.code_tokens, k, exclude_self.then_some(q.id)).map(|h| h.0))
        }
        Baseline::Retrieve => unreachable!("handled above"),
    };
    Ok(queries
        .iter()
        .map(|q| {
            let tokens = chooser(q).and_then(|id| comments.get(&id)).map_or_else(empty_exemplar, |c| (*c).clone());
            (q.id, tokens)
        })
        .collect())
}
