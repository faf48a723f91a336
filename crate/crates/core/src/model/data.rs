use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Example, ModelError, RefineModel};
use crate::corpus::Sample;
use crate::retrieval::{ExemplarPair, NONE_TOKEN};

/// Where the exemplar and similar-code inputs come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExemplarMode {
    /// The BM25 pair.
    Retrieved,
    /// A uniformly drawn training sample's comment and code.
    Random,
    /// The empty-exemplar marker.
    None,
}

impl FromStr for ExemplarMode {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "retrieved" => Ok(Self::Retrieved),
            "random" => Ok(Self::Random),
            "none" => Ok(Self::None),
            _ => Err(ModelError::Config(format!("unknown exemplar mode `{s}`"))),
        }
    }
}

impl fmt::Display for ExemplarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Retrieved => "retrieved",
            Self::Random => "random",
            Self::None => "none",
        })
    }
}

/// Model inputs for `queries`. Retrieved mode looks up each query's pair
/// and the similar sample's code in `train`; random mode draws from
/// `train` with a generator seeded by `seed`.
pub fn build_examples(
    model: &RefineModel,
    queries: &[Sample],
    pairs: &[ExemplarPair],
    train: &[Sample],
    mode: ExemplarMode,
    seed: u64,
) -> Result<Vec<Example>, ModelError> {
    let marker = [NONE_TOKEN];
    let by_id: HashMap<u64, &Sample> = train.iter().map(|s| (s.id, s)).collect();
    let pair_of: HashMap<u64, &ExemplarPair> = pairs.iter().map(|p| (p.query_id, p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    queries
        .iter()
        .map(|q| match mode {
            ExemplarMode::None => Ok(model.example(q, &marker, &marker)),
            ExemplarMode::Random => {
                if train.is_empty() {
                    return Ok(model.example(q, &marker, &marker));
                }
                let pick = &train[rng.gen_range(0..train.len())];
                Ok(model.example(q, &pick.code_tokens, &pick.comment_tokens))
            }
            ExemplarMode::Retrieved => {
                let pair = pair_of.get(&q.id).ok_or(ModelError::MissingPair(q.id))?;
                match pair.similar_id {
                    None => Ok(model.example(q, &marker, &marker)),
                    Some(sid) => {
                        let similar = by_id.get(&sid).ok_or(ModelError::MissingSample(sid))?;
                        Ok(model.example(q, &similar.code_tokens, &pair.exemplar_tokens))
                    }
                }
            }
        })
        .collect()
}
