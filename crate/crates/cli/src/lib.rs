//! Command-line pipeline: preprocess, index, pair, train, generate,
//! evaluate and the retrieval baselines, each as a separate stage.

pub mod args;
pub mod config;
pub mod error;
pub mod stages;

pub use args::{run, Cli, Command, Common};
pub use config::RunConfig;
pub use error::CliError;
