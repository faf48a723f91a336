//! Retrieve-and-refine code comment generation.
//!
//! A function's comment is produced in two stages: the most similar function
//! in a training corpus is found with BM25 and its comment becomes an
//! *exemplar*; a four-encoder attentional sequence-to-sequence model then
//! rewrites the exemplar, with a learned similarity gate deciding how much
//! of the exemplar to trust.
//!
//! The crate also carries the supporting pieces: corpus preprocessing, a
//! Java method parser with structure-based traversal, a small reverse-mode
//! autodiff engine, IR baselines (VSM, LSI, NNGen) and BLEU evaluation.

pub mod autodiff;
pub mod baselines;
pub mod corpus;
pub mod eval;
pub mod formats;
pub mod model;
pub mod parser;
pub mod retrieval;

mod binio;

pub use binio::DecodeError;
