//! Dense reverse-mode automatic differentiation over 2-D `f64` tensors.
//!
//! Forward code builds values on a [`Tape`]; [`Tape::backward`] sweeps it in
//! reverse and accumulates parameter gradients into a [`ParamStore`].

mod optim;
mod params;
mod tape;
mod tensor;

use thiserror::Error;

pub use optim::sgd_step;
pub use params::{ParamId, ParamStore, PARAMS_MAGIC, PARAMS_VERSION};
pub use tape::{Gradients, Tape, Var};
pub(crate) use tensor::log_sum_exp;
pub use tensor::{matmul, sigmoid, Tensor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutodiffError {
    #[error("target class {target} out of range for {classes} classes")]
    TargetOutOfRange { target: usize, classes: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}
