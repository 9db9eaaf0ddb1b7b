//! Policy/value network with ownership and opponent-move heads, trained by
//! hand-written backpropagation.

mod features;
pub mod io;
mod network;
mod train;

pub use features::{encode, FeaturePlanes, INPUT_PLANES, SCALAR_INPUTS, SPATIAL_PLANES};
pub use io::{load, save};
pub use network::{Arch, NetOutput, Network};
pub use train::{loss_and_gradients, sgd_step, LossStats, LossWeights, Sgd, TrainingExample};

use thiserror::Error;

use crate::go::GameState;
use crate::mcts::{EvalError, EvalResult, Evaluator};

#[derive(Debug, Error)]
pub enum NetError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bad architecture: {0}")]
    Arch(String),
    #[error("empty training batch")]
    EmptyBatch,
    #[error("non-finite loss at batch example {example}")]
    NonFiniteLoss { example: usize },
    #[error("not a weights file (bad magic)")]
    BadMagic,
    #[error("weights format version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
    #[error("weights file is truncated")]
    Truncated,
    #[error("weights file checksum mismatch")]
    Checksum,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Evaluator for Network {
    fn evaluate(&self, state: &GameState, legal: &[bool]) -> Result<EvalResult, EvalError> {
        let f = encode(state);
        let out = self.forward_one(&f, legal).map_err(|e| match e {
            NetError::Shape(s) => EvalError::Shape(s),
            other => EvalError::Failed(other.to_string()),
        })?;
        Ok(EvalResult {
            value: out.value,
            policy: out.policy,
            ownership: Some(out.ownership),
            opponent_move: Some(out.opponent),
        })
    }
}
