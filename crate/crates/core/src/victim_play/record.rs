use crate::go::{to_sgf, Color, GameState, GoError, Grid, Rules, Score, Vertex};

/// One move of a recorded game.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveInfo {
    pub color: Color,
    pub mv: Vertex,
    /// Mover's value estimate, if the agent reported one.
    pub value: Option<f64>,
    /// Mover's search distribution over move indices, if reported.
    pub policy: Option<Vec<f64>>,
    pub forward_passes: u64,
}

/// A finished game with per-move agent diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct GameRecord {
    pub rules: Rules,
    pub setup: Grid,
    pub first_to_move: Color,
    pub black: String,
    pub white: String,
    pub moves: Vec<MoveInfo>,
    pub score: Score,
    pub final_hash: u64,
    /// Adversary colour in victim-play games.
    pub adversary: Option<Color>,
    pub victim_id: Option<String>,
}

impl GameRecord {
    /// Record of a bare game state (no per-move diagnostics).
    pub fn from_state(state: &GameState, black: impl Into<String>, white: impl Into<String>) -> GameRecord {
        GameRecord {
            rules: *state.rules(),
            setup: state.setup().grid.clone(),
            first_to_move: state.setup().to_move,
            black: black.into(),
            white: white.into(),
            moves: state
                .moves()
                .iter()
                .map(|&(color, mv)| MoveInfo { color, mv, value: None, policy: None, forward_passes: 0 })
                .collect(),
            score: crate::go::score_tromp_taylor(state),
            final_hash: state.hash(),
            adversary: None,
            victim_id: None,
        }
    }

    /// Replay the move list through the rules engine.
    pub fn replay(&self) -> Result<GameState, GoError> {
        let mut s = GameState::from_setup(self.rules, self.setup.clone(), self.first_to_move)?;
        for m in &self.moves {
            s = s.play(m.mv)?;
        }
        Ok(s)
    }

    pub fn length(&self) -> usize {
        self.moves.len()
    }

    /// Result for `color`: 1 win, 0.5 draw, 0 loss.
    pub fn points_for(&self, color: Color) -> f64 {
        (self.score.winner.value_for(color) + 1.0) / 2.0
    }

    pub fn to_sgf(&self) -> Result<String, GoError> {
        let sgf = to_sgf(&self.replay()?);
        // Player names go into the root node.
        let names = format!("PB[{}]PW[{}]", escape(&self.black), escape(&self.white));
        Ok(sgf.replacen("RU[Tromp-Taylor]", &format!("RU[Tromp-Taylor]{names}"), 1))
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace(']', "\\]")
}
