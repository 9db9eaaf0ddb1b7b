//! Policy/value-guided Monte-Carlo tree search.
//!
//! Values in the tree are always from the root player's perspective.
//! Evaluators report the side to move's perspective; the conversion happens
//! when a node is inserted.

mod eval;
mod search;
mod tree;

pub use eval::*;
pub use search::*;
pub use tree::*;

use thiserror::Error;

use crate::go::{GoError, Vertex};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("cannot search from a finished game")]
    TerminalRoot,
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("evaluation failed at move sequence [{path}]: {source}")]
    Eval {
        path: String,
        #[source]
        source: EvalError,
    },
    #[error("root has no searched children; fall back to the raw policy")]
    NoChildren,
    #[error(transparent)]
    Go(#[from] GoError),
}

impl SearchError {
    pub(crate) fn eval(path: &[Vertex], size: usize, source: EvalError) -> SearchError {
        let path = path.iter().map(|v| v.to_gtp(size)).collect::<Vec<_>>().join(" ");
        SearchError::Eval { path, source }
    }
}

/// Search parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Number of playouts N; the finished tree has N+1 nodes.
    pub playouts: usize,
    /// Exploration coefficient α.
    pub alpha: f64,
    /// First-play-urgency coefficient β.
    pub beta: f64,
    /// Final-move temperature τ; 0 selects the most visited child.
    pub tau: f64,
    /// Mix Dirichlet noise into the root prior.
    pub root_noise: bool,
    /// Average evaluator outputs over the 8 board symmetries.
    pub symmetry_average: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            playouts: 64,
            alpha: 1.1,
            beta: 0.2,
            tau: 0.0,
            root_noise: false,
            symmetry_average: false,
        }
    }
}

impl SearchConfig {
    pub fn with_playouts(mut self, n: usize) -> Self {
        self.playouts = n;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.alpha) || !ok(self.beta) || !ok(self.tau) {
            return Err(SearchError::Config(format!(
                "alpha, beta and tau must be finite and non-negative (got {}, {}, {})",
                self.alpha, self.beta, self.tau
            )));
        }
        Ok(())
    }
}
