//! The refine model: gated four-encoder attentional sequence-to-sequence
//! network, its training loop, search and checkpoints.

mod beam;
mod checkpoint;
mod config;
mod data;
mod network;
mod train;
mod vocab;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::autodiff::{AutodiffError, ParamStore, Tape, Tensor};
use crate::binio::DecodeError;
use crate::corpus::Sample;

pub use beam::{beam_search, greedy_search, Hypothesis, SearchConfig, StepModel};
pub use checkpoint::{CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use config::{ModelConfig, Selection};
pub use data::{build_examples, ExemplarMode};
pub use network::{Dropout, Example, FirstStep, Stream};
pub use train::{train, EpochStats, TrainOutcome};
pub use vocab::{Vocabulary, BOS, EOS, NONE_ID, OTHER_ID, PAD, RESERVED, UNK};

use network::{layout, Decoder, Network, ParamIds};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("empty {stream} sequence in batch row {row}")]
    EmptySequence { stream: &'static str, row: usize },
    #[error(transparent)]
    Autodiff(#[from] AutodiffError),
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("no exemplar pair for sample {0}")]
    MissingPair(u64),
    #[error("similar sample {0} is not in the training corpus")]
    MissingSample(u64),
    #[error("corrupt checkpoint: {0}")]
    Checkpoint(#[from] DecodeError),
    #[error("parameter layout: {0}")]
    Layout(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineModel {
    pub config: ModelConfig,
    pub code_vocab: Vocabulary,
    pub sbt_vocab: Vocabulary,
    pub comment_vocab: Vocabulary,
    pub params: ParamStore,
    ids: ParamIds,
}

impl RefineModel {
    /// Fresh model with uniform `[-init_range, init_range)` weights drawn
    /// from the configured seed.
    pub fn new(
        config: ModelConfig,
        code_vocab: Vocabulary,
        sbt_vocab: Vocabulary,
        comment_vocab: Vocabulary,
    ) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = ParamStore::new();
        let sizes = [code_vocab.len(), sbt_vocab.len(), code_vocab.len(), comment_vocab.len()];
        for (name, r, c) in layout(&config, sizes) {
            params.add(name, Tensor::uniform(r, c, config.init_range, &mut rng));
        }
        Self::from_parts(config, code_vocab, sbt_vocab, comment_vocab, params)
    }

    /// Assembles a model, checking every parameter against the shapes the
    /// configuration and vocabularies imply.
    pub fn from_parts(
        config: ModelConfig,
        code_vocab: Vocabulary,
        sbt_vocab: Vocabulary,
        comment_vocab: Vocabulary,
        params: ParamStore,
    ) -> Result<Self, ModelError> {
        config.validate()?;
        let sizes = [code_vocab.len(), sbt_vocab.len(), code_vocab.len(), comment_vocab.len()];
        let expected = layout(&config, sizes);
        if expected.len() != params.len() {
            return Err(ModelError::Layout(format!("expected {} parameters, found {}", expected.len(), params.len())));
        }
        for (name, r, c) in &expected {
            let id = params.id(name).ok_or_else(|| ModelError::Layout(format!("missing `{name}`")))?;
            if params.value(id).shape() != (*r, *c) {
                return Err(ModelError::Layout(format!("`{name}` has the wrong shape")));
            }
        }
        let ids = ParamIds::resolve(&params, config.tie_fusion)
            .ok_or_else(|| ModelError::Layout("unresolved parameter".into()))?;
        Ok(Self { config, code_vocab, sbt_vocab, comment_vocab, params, ids })
    }

    /// Code (shared by input and similar code), SBT and comment vocabularies
    /// from training samples.
    pub fn vocabularies(train: &[Sample], config: &ModelConfig) -> (Vocabulary, Vocabulary, Vocabulary) {
        (
            Vocabulary::build(train.iter().map(|s| s.code_tokens.as_slice()), config.code_vocab_cap),
            Vocabulary::build(train.iter().map(|s| s.sbt_tokens.as_slice()), config.sbt_vocab_cap),
            Vocabulary::build(train.iter().map(|s| s.comment_tokens.as_slice()), config.comment_vocab_cap),
        )
    }

    fn net(&self) -> Network<'_> {
        Network { cfg: &self.config, store: &self.params, ids: &self.ids }
    }

    /// Maps one sample and its exemplar inputs to truncated ids.
    pub fn example<S: AsRef<str>, T: AsRef<str>>(
        &self,
        sample: &Sample,
        similar_code: &[S],
        exemplar: &[T],
    ) -> Example {
        let src = self.config.max_src_len;
        let cut = |v: Vec<usize>| v.into_iter().take(src).collect::<Vec<_>>();
        Example {
            id: sample.id,
            code: cut(self.code_vocab.encode(&sample.code_tokens)),
            sbt: cut(self.sbt_vocab.encode(&sample.sbt_tokens)),
            similar_code: cut(self.code_vocab.encode(similar_code)),
            exemplar: cut(self.comment_vocab.encode(exemplar)),
            target: self
                .comment_vocab
                .encode(&sample.comment_tokens)
                .into_iter()
                .take(self.config.max_content_len())
                .collect(),
        }
    }

    /// Teacher-forced loss without dropout.
    pub fn loss(&self, batch: &[&Example]) -> Result<f64, ModelError> {
        let mut tape = Tape::new();
        let l = self.net().loss(&mut tape, batch, &mut Dropout::off(), None)?;
        Ok(tape.value(l).item())
    }

    /// Forward and backward on one batch; gradients are added to `params`.
    pub fn accumulate_gradients(&mut self, batch: &[&Example], dropout: Dropout) -> Result<f64, ModelError> {
        let mut dropout = dropout;
        let mut tape = Tape::new();
        let l = self.net().loss(&mut tape, batch, &mut dropout, None)?;
        let value = tape.value(l).item();
        if value.is_finite() {
            tape.backward(l, &mut self.params);
        }
        Ok(value)
    }

    pub fn search_config(&self, beam: usize) -> SearchConfig {
        SearchConfig { beam, max_len: self.config.max_content_len(), bos: BOS, eos: EOS, banned: vec![PAD] }
    }

    /// Beam-search decoding; returns comment content ids.
    pub fn generate_ids(&self, ex: &Example, beam: usize) -> Result<Hypothesis, ModelError> {
        let (mut dec, init) = Decoder::new(self.net(), ex, None)?;
        Ok(beam_search(&mut dec, init, &self.search_config(beam)))
    }

    pub fn greedy_ids(&self, ex: &Example) -> Result<Hypothesis, ModelError> {
        let (mut dec, init) = Decoder::new(self.net(), ex, None)?;
        Ok(greedy_search(&mut dec, init, &self.search_config(1)))
    }

    pub fn generate(&self, ex: &Example, beam: usize) -> Result<Vec<String>, ModelError> {
        Ok(self.comment_vocab.decode(&self.generate_ids(ex, beam)?.tokens))
    }

    /// Gate, initial state and first decoding step, optionally with the
    /// similarity score forced to a fixed value.
    pub fn first_step(&self, batch: &[&Example], sim_override: Option<f64>) -> Result<FirstStep, ModelError> {
        self.net().first_step(batch, sim_override)
    }

    /// Per-position and final states of one encoder.
    pub fn encode_stream(&self, stream: Stream, seqs: &[&[usize]]) -> Result<(Vec<Tensor>, Tensor), ModelError> {
        self.net().encode_only(stream, seqs)
    }

    /// Names of the parameters owned by one encoder.
    pub fn encoder_param_names(&self, stream: Stream) -> Vec<String> {
        self.ids.encoder_params(stream).into_iter().map(|id| self.params.name(id).to_string()).collect()
    }
}

#[cfg(test)]
mod tests;
