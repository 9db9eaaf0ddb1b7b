//! Victim-play training of adversarial policies: adversary-vs-frozen-victim
//! games, adversary-turn data harvesting, a reuse-limited replay buffer and
//! a curriculum over victim checkpoints.

mod attack;
mod buffer;
mod config;
mod curriculum;
mod game;
mod record;
mod selfplay;

pub use attack::*;
pub use buffer::*;
pub use config::*;
pub use curriculum::*;
pub use game::*;
pub use record::*;
pub use selfplay::*;

use thiserror::Error;

use crate::arena::AgentError;
use crate::go::GoError;
use crate::nnet::NetError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Go(#[from] GoError),
    #[error("replay buffer starved: {available} of {rows} rows usable, batch needs {batch}")]
    Starved { rows: usize, available: usize, batch: usize },
    #[error("non-finite loss at step {step} (batch example {example})")]
    NonFinite { step: u64, example: usize },
    #[error(
        "game budget exhausted after {games} games: stage {stage} ({victim}) stuck at win rate {win_rate:.3} over {window_games} games"
    )]
    BudgetExhausted { stage: usize, victim: String, games: u64, window_games: usize, win_rate: f64 },
}
