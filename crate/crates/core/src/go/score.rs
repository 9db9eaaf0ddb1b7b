use std::fmt;

use super::grid::{neighbors, Grid};
use super::types::{Color, MAX_CELLS};
use super::GameState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Winner {
    Black,
    White,
    Draw,
}

impl Winner {
    pub fn color(self) -> Option<Color> {
        match self {
            Winner::Black => Some(Color::Black),
            Winner::White => Some(Color::White),
            Winner::Draw => None,
        }
    }

    /// +1 if `c` won, −1 if it lost, 0 for a draw.
    pub fn value_for(self, c: Color) -> f64 {
        match self.color() {
            Some(w) if w == c => 1.0,
            Some(_) => -1.0,
            None => 0.0,
        }
    }
}

/// Area score. `white_points` includes komi.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Score {
    pub black_points: f64,
    pub white_points: f64,
    pub winner: Winner,
}

impl Score {
    pub fn margin(&self) -> f64 {
        (self.black_points - self.white_points).abs()
    }

    /// Signed margin from `c`'s perspective.
    pub fn lead(&self, c: Color) -> f64 {
        match c {
            Color::Black => self.black_points - self.white_points,
            Color::White => self.white_points - self.black_points,
        }
    }

    /// SGF/GTP result string, e.g. `B+3.5` or `0` for a draw.
    pub fn result_string(&self) -> String {
        match self.winner {
            Winner::Black => format!("B+{}", self.margin()),
            Winner::White => format!("W+{}", self.margin()),
            Winner::Draw => "0".to_string(),
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "B {} W {} ({})",
            self.black_points,
            self.white_points,
            self.result_string()
        )
    }
}

/// Per-vertex area ownership: the stone colour, or the sole colour an empty
/// region reaches, or `None` for neutral points.
pub fn area_ownership(grid: &Grid) -> Vec<Option<Color>> {
    let n = grid.size();
    let area = n * n;
    let mut owner = vec![None; area];
    let mut seen = [false; MAX_CELLS];
    let mut region = Vec::new();
    for start in 0..area {
        match grid.get_index(start) {
            Some(c) => owner[start] = Some(c),
            None if !seen[start] => {
                region.clear();
                let (mut black, mut white) = (false, false);
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(v) = stack.pop() {
                    region.push(v);
                    for nb in neighbors(v, n) {
                        match grid.get_index(nb) {
                            Some(Color::Black) => black = true,
                            Some(Color::White) => white = true,
                            None if !seen[nb] => {
                                seen[nb] = true;
                                stack.push(nb);
                            }
                            None => {}
                        }
                    }
                }
                let who = match (black, white) {
                    (true, false) => Some(Color::Black),
                    (false, true) => Some(Color::White),
                    _ => None,
                };
                for &v in &region {
                    owner[v] = who;
                }
            }
            None => {}
        }
    }
    owner
}

/// Tromp-Taylor area score of a grid with the given komi.
pub fn score_grid(grid: &Grid, komi: f64) -> Score {
    let owner = area_ownership(grid);
    let black = owner.iter().filter(|&&o| o == Some(Color::Black)).count() as f64;
    let white = owner.iter().filter(|&&o| o == Some(Color::White)).count() as f64 + komi;
    let winner = if black > white {
        Winner::Black
    } else if white > black {
        Winner::White
    } else {
        Winner::Draw
    };
    Score { black_points: black, white_points: white, winner }
}

pub fn score_tromp_taylor(state: &GameState) -> Score {
    score_grid(state.grid(), state.rules().komi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::go::Rules;

    #[test]
    fn empty_board_white_wins_by_komi() {
        let s = GameState::new(Rules::new(9)).unwrap();
        let score = score_tromp_taylor(&s);
        assert_eq!(score.winner, Winner::White);
        assert_eq!(score.margin(), 7.5);
        assert_eq!(score.result_string(), "W+7.5");
    }

    #[test]
    fn lone_black_stone_owns_everything() {
        let g = Grid::from_diagram("...\n.X.\n...").unwrap();
        let score = score_grid(&g, 0.0);
        assert_eq!(score.black_points, 9.0);
        assert_eq!(score.white_points, 0.0);
        assert_eq!(score.winner, Winner::Black);
    }

    #[test]
    fn shared_region_is_neutral() {
        let g = Grid::from_diagram("X..\n...\n..O").unwrap();
        let score = score_grid(&g, 0.5);
        assert_eq!(score.black_points, 1.0);
        assert_eq!(score.white_points, 1.5);
    }

    #[test]
    fn equal_points_is_draw() {
        let g = Grid::from_diagram("X.O\nX.O\nX.O").unwrap();
        let score = score_grid(&g, 0.0);
        assert_eq!(score.winner, Winner::Draw);
        assert_eq!(score.result_string(), "0");
    }
}
