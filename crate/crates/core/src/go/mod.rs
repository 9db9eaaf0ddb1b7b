//! Tromp-Taylor rules kernel.

mod grid;
mod score;
mod sgf;
mod state;
mod symmetry;
mod types;
pub mod zobrist;

use thiserror::Error;

pub use grid::{neighbors, Grid, Placement};
pub use score::{area_ownership, score_grid, score_tromp_taylor, Score, Winner};
pub use sgf::{from_sgf, to_sgf, SgfError};
pub use state::{GameState, Setup};
pub use symmetry::{symmetries, Symmetry};
pub use types::{Color, Point, Rules, Vertex, MAX_CELLS, MAX_SIZE, MIN_SIZE};
pub use zobrist::zobrist_hash;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GoError {
    #[error("invalid rules: {0}")]
    InvalidRules(String),
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error("vertex {0} is off the board")]
    OutOfBounds(Vertex),
    #[error("vertex {0} is occupied")]
    Occupied(Vertex),
    #[error("move {0} would repeat a previous position")]
    Superko(Vertex),
    #[error("move {0} is suicide")]
    Suicide(Vertex),
    #[error("game is over")]
    Terminal,
}
