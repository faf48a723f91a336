use std::collections::HashMap;

use crate::parser::OTHER;
use crate::retrieval::NONE_TOKEN;

pub const PAD: usize = 0;
pub const UNK: usize = 1;
pub const BOS: usize = 2;
pub const EOS: usize = 3;
pub const OTHER_ID: usize = 4;
pub const NONE_ID: usize = 5;

pub const RESERVED: [&str; 6] = ["<pad>", "<unk>", "<s>", "</s>", OTHER, NONE_TOKEN];

/// Token to id mapping with the reserved entries at fixed ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, usize>,
}

impl Vocabulary {
    /// The `cap` most frequent non-reserved tokens, ties broken by token text.
    pub fn build<'a, I, S>(sequences: I, cap: usize) -> Self
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for seq in sequences {
            for t in seq {
                let t = t.as_ref();
                if !RESERVED.contains(&t) {
                    *counts.entry(t).or_default() += 1;
                }
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let tokens =
            RESERVED.iter().copied().chain(ranked.into_iter().take(cap).map(|(t, _)| t)).map(String::from).collect();
        Self::from_tokens(tokens).expect("reserved prefix and unique tokens")
    }

    /// Rebuilds from an id-ordered token list, as stored in checkpoints.
    pub fn from_tokens(tokens: Vec<String>) -> Option<Self> {
        if tokens.len() < RESERVED.len() || tokens.iter().zip(RESERVED).any(|(a, b)| a != b) {
            return None;
        }
        let ids: HashMap<String, usize> = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        (ids.len() == tokens.len()).then_some(Self { tokens, ids })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> usize {
        self.ids.get(token).copied().unwrap_or(UNK)
    }

    pub fn token(&self, id: usize) -> &str {
        self.tokens.get(id).map_or(RESERVED[UNK], String::as_str)
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens.iter().map(|t| self.id(t.as_ref())).collect()
    }

    pub fn decode(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| self.token(i).to_string()).collect()
    }
}
