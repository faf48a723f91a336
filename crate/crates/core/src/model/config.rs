use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Which validation signal picks the checkpoint that training returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selection {
    Loss,
    Bleu,
}

impl FromStr for Selection {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "loss" => Ok(Self::Loss),
            "bleu" => Ok(Self::Bleu),
            _ => Err(ModelError::Config(format!("unknown selection `{s}`"))),
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Loss => "loss",
            Self::Bleu => "bleu",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub embed_dim: usize,
    /// Per direction; the decoder state is twice this.
    pub hidden_dim: usize,
    /// Hidden size of the attention alignment MLP.
    pub attention_dim: usize,
    pub max_src_len: usize,
    /// Decoder length including `<s>` and `</s>`.
    pub max_tgt_len: usize,
    pub dropout: f64,
    pub beam_size: usize,
    pub code_vocab_cap: usize,
    pub sbt_vocab_cap: usize,
    pub comment_vocab_cap: usize,
    pub lr: f64,
    pub lr_decay: f64,
    pub clip_norm: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub init_range: f64,
    /// Share the fusion affine map between the initial state and the contexts.
    pub tie_fusion: bool,
    pub selection: Selection,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            embed_dim: 100,
            hidden_dim: 256,
            attention_dim: 256,
            max_src_len: 100,
            max_tgt_len: 13,
            dropout: 0.2,
            beam_size: 5,
            code_vocab_cap: 30_000,
            sbt_vocab_cap: 30_000,
            comment_vocab_cap: 20_000,
            lr: 0.2,
            lr_decay: 0.95,
            clip_norm: 5.0,
            batch_size: 256,
            epochs: 20,
            init_range: 0.08,
            tie_fusion: true,
            selection: Selection::Loss,
            seed: 0,
        }
    }
}

const KEYS: &[&str] = &[
    "embed_dim",
    "hidden_dim",
    "attention_dim",
    "max_src_len",
    "max_tgt_len",
    "dropout",
    "beam_size",
    "code_vocab_cap",
    "sbt_vocab_cap",
    "comment_vocab_cap",
    "lr",
    "lr_decay",
    "clip_norm",
    "batch_size",
    "epochs",
    "init_range",
    "tie_fusion",
    "selection",
    "seed",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ModelError> {
    value.parse().map_err(|_| ModelError::Config(format!("bad value `{value}` for {key}")))
}

impl ModelConfig {
    pub fn decoder_dim(&self) -> usize {
        2 * self.hidden_dim
    }

    /// Content tokens a generated comment may hold.
    pub fn max_content_len(&self) -> usize {
        self.max_tgt_len.saturating_sub(2)
    }

    /// Learning rate used during epoch `epoch` (0-based).
    pub fn lr_at(&self, epoch: usize) -> f64 {
        self.lr * self.lr_decay.powi(epoch as i32)
    }

    pub fn is_key(key: &str) -> bool {
        KEYS.contains(&key)
    }

    /// Sets one field from its textual form. Returns `Ok(false)` for keys
    /// that are not model settings.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, ModelError> {
        match key {
            "embed_dim" => self.embed_dim = parse(key, value)?,
            "hidden_dim" => self.hidden_dim = parse(key, value)?,
            "attention_dim" => self.attention_dim = parse(key, value)?,
            "max_src_len" => self.max_src_len = parse(key, value)?,
            "max_tgt_len" => self.max_tgt_len = parse(key, value)?,
            "dropout" => self.dropout = parse(key, value)?,
            "beam_size" => self.beam_size = parse(key, value)?,
            "code_vocab_cap" => self.code_vocab_cap = parse(key, value)?,
            "sbt_vocab_cap" => self.sbt_vocab_cap = parse(key, value)?,
            "comment_vocab_cap" => self.comment_vocab_cap = parse(key, value)?,
            "lr" => self.lr = parse(key, value)?,
            "lr_decay" => self.lr_decay = parse(key, value)?,
            "clip_norm" => self.clip_norm = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "init_range" => self.init_range = parse(key, value)?,
            "tie_fusion" => self.tie_fusion = parse(key, value)?,
            "selection" => self.selection = value.parse()?,
            "seed" => self.seed = parse(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let values = [
            self.embed_dim.to_string(),
            self.hidden_dim.to_string(),
            self.attention_dim.to_string(),
            self.max_src_len.to_string(),
            self.max_tgt_len.to_string(),
            self.dropout.to_string(),
            self.beam_size.to_string(),
            self.code_vocab_cap.to_string(),
            self.sbt_vocab_cap.to_string(),
            self.comment_vocab_cap.to_string(),
            self.lr.to_string(),
            self.lr_decay.to_string(),
            self.clip_norm.to_string(),
            self.batch_size.to_string(),
            self.epochs.to_string(),
            self.init_range.to_string(),
            self.tie_fusion.to_string(),
            self.selection.to_string(),
            self.seed.to_string(),
        ];
        KEYS.iter().map(|k| k.to_string()).zip(values).collect()
    }

    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> Result<Self, ModelError> {
        let mut cfg = Self::default();
        for (k, v) in pairs {
            if !cfg.set(k.as_ref(), v.as_ref())? {
                return Err(ModelError::Config(format!("unknown key `{}`", k.as_ref())));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("embed_dim", self.embed_dim),
            ("hidden_dim", self.hidden_dim),
            ("attention_dim", self.attention_dim),
            ("max_src_len", self.max_src_len),
            ("beam_size", self.beam_size),
            ("batch_size", self.batch_size),
        ];
        if let Some((k, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(ModelError::Config(format!("{k} must be positive")));
        }
        if self.max_tgt_len < 3 {
            return Err(ModelError::Config("max_tgt_len must leave room for a token".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(ModelError::Config("dropout must be in [0, 1)".into()));
        }
        let finite_nonneg = [
            ("lr", self.lr),
            ("lr_decay", self.lr_decay),
            ("clip_norm", self.clip_norm),
            ("init_range", self.init_range),
        ];
        if let Some((k, _)) = finite_nonneg.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            return Err(ModelError::Config(format!("{k} must be finite and non-negative")));
        }
        Ok(())
    }
}
