use std::sync::Arc;

use super::grid::{Grid, Placement};
use super::symmetry::Symmetry;
use super::types::{Color, Point, Rules, Vertex};
use super::{zobrist, GoError};

/// Initial position of a game: usually the empty board, but fixtures and SGF
/// files may carry setup stones.
#[derive(Clone, Debug, PartialEq)]
pub struct Setup {
    pub grid: Grid,
    pub to_move: Color,
}

/// An immutable Go position under Tromp-Taylor rules together with the game
/// history needed for positional superko.
#[derive(Clone, Debug)]
pub struct GameState {
    grid: Grid,
    hash: u64,
    to_move: Color,
    consecutive_passes: u8,
    moves: Vec<(Color, Vertex)>,
    /// `hashes[i]` is the grid hash after `i` moves.
    hashes: Vec<u64>,
    rules: Rules,
    setup: Arc<Setup>,
}

impl GameState {
    pub fn new(rules: Rules) -> Result<GameState, GoError> {
        rules.validate()?;
        let grid = Grid::new(rules.board_size);
        GameState::from_setup(rules, grid, Color::Black)
    }

    /// Start a game from an arbitrary position. Every chain on `grid` must have
    /// a liberty.
    pub fn from_setup(rules: Rules, grid: Grid, to_move: Color) -> Result<GameState, GoError> {
        rules.validate()?;
        if grid.size() != rules.board_size {
            return Err(GoError::InvalidRules(format!(
                "setup grid is {}x{} but rules say {}",
                grid.size(),
                grid.size(),
                rules.board_size
            )));
        }
        if !grid.all_chains_have_liberties() {
            return Err(GoError::InvalidSetup("setup contains a chain without liberties".into()));
        }
        let hash = zobrist::zobrist_hash(&grid);
        Ok(GameState {
            grid: grid.clone(),
            hash,
            to_move,
            consecutive_passes: 0,
            moves: Vec::new(),
            hashes: vec![hash],
            rules,
            setup: Arc::new(Setup { grid, to_move }),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.rules.board_size
    }

    pub fn hash(&self) -> u64 {
        self.hash
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    pub fn consecutive_passes(&self) -> usize {
        self.consecutive_passes as usize
    }

    pub fn moves(&self) -> &[(Color, Vertex)] {
        &self.moves
    }

    pub fn move_count(&self) -> usize {
        self.moves.len()
    }

    pub fn last_move(&self) -> Option<(Color, Vertex)> {
        self.moves.last().copied()
    }

    pub fn position_hashes(&self) -> &[u64] {
        &self.hashes
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn setup(&self) -> &Setup {
        &self.setup
    }

    pub fn is_terminal(&self) -> bool {
        self.consecutive_passes >= 2 || self.moves.len() >= self.rules.turn_limit
    }

    /// Outcome of placing a stone for the side to move, or the reason it is
    /// illegal. Pass is handled by [`GameState::play`].
    fn try_place(&self, p: Point) -> Result<Placement, GoError> {
        let n = self.size();
        if p.row as usize >= n || p.col as usize >= n {
            return Err(GoError::OutOfBounds(Vertex::At(p)));
        }
        let idx = p.index(n);
        if self.grid.get_index(idx).is_some() {
            return Err(GoError::Occupied(Vertex::At(p)));
        }
        let placed = self.grid.place(idx, self.to_move, self.hash);
        if placed.suicide && !self.rules.suicide_allowed {
            return Err(GoError::Suicide(Vertex::At(p)));
        }
        if self.repeats_position(placed.hash, &placed.grid) {
            return Err(GoError::Superko(Vertex::At(p)));
        }
        Ok(placed)
    }

    /// Positional superko: hash membership, confirmed by full-grid comparison.
    fn repeats_position(&self, hash: u64, grid: &Grid) -> bool {
        self.hashes
            .iter()
            .enumerate()
            .any(|(i, &h)| h == hash && &self.grid_after(i) == grid)
    }

    /// Grid after the first `count` moves of the game.
    pub fn grid_after(&self, count: usize) -> Grid {
        if count == self.moves.len() {
            return self.grid.clone();
        }
        let mut grid = self.setup.grid.clone();
        let mut hash = zobrist::zobrist_hash(&grid);
        for &(color, v) in &self.moves[..count] {
            if let Vertex::At(p) = v {
                let placed = grid.place(p.index(self.size()), color, hash);
                grid = placed.grid;
                hash = placed.hash;
            }
        }
        grid
    }

    pub fn is_legal(&self, v: Vertex) -> bool {
        if self.is_terminal() {
            return false;
        }
        match v {
            Vertex::Pass => true,
            Vertex::At(p) => self.try_place(p).is_ok(),
        }
    }

    /// All legal moves, placements in row-major order followed by Pass.
    pub fn legal_moves(&self) -> Result<Vec<Vertex>, GoError> {
        if self.is_terminal() {
            return Err(GoError::Terminal);
        }
        let n = self.size();
        let mut out = Vec::with_capacity(n * n + 1);
        for idx in 0..n * n {
            if self.grid.get_index(idx).is_none() {
                let p = Point::from_index(idx, n);
                if self.try_place(p).is_ok() {
                    out.push(Vertex::At(p));
                }
            }
        }
        out.push(Vertex::Pass);
        Ok(out)
    }

    /// Legality per move index (`size^2 + 1` entries, pass last).
    pub fn legal_mask(&self) -> Result<Vec<bool>, GoError> {
        let n = self.size();
        let mut mask = vec![false; n * n + 1];
        for v in self.legal_moves()? {
            mask[v.index(n)] = true;
        }
        Ok(mask)
    }

    pub fn play(&self, v: Vertex) -> Result<GameState, GoError> {
        if self.is_terminal() {
            return Err(GoError::Terminal);
        }
        let mut next = self.clone();
        match v {
            Vertex::Pass => {
                next.consecutive_passes = (self.consecutive_passes + 1).min(2);
            }
            Vertex::At(p) => {
                let placed = self.try_place(p)?;
                next.grid = placed.grid;
                next.hash = placed.hash;
                next.consecutive_passes = 0;
            }
        }
        next.moves.push((self.to_move, v));
        next.hashes.push(next.hash);
        next.to_move = self.to_move.opponent();
        Ok(next)
    }

    /// Replay `moves` from a fresh game under `rules`.
    pub fn replay(rules: Rules, moves: &[Vertex]) -> Result<GameState, GoError> {
        let mut s = GameState::new(rules)?;
        for &v in moves {
            s = s.play(v)?;
        }
        Ok(s)
    }

    /// Same game with every coordinate mapped through `sym`.
    pub fn transformed(&self, sym: Symmetry) -> GameState {
        let n = self.size();
        let grid = sym.apply_grid(&self.setup.grid);
        let mut s = GameState::from_setup(self.rules, grid, self.setup.to_move)
            .expect("symmetric setup is valid");
        for &(_, v) in &self.moves {
            s = s.play(sym.apply_vertex(v, n)).expect("symmetric move is legal");
        }
        s
    }
}

impl PartialEq for GameState {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid
            && self.to_move == other.to_move
            && self.consecutive_passes == other.consecutive_passes
            && self.moves == other.moves
            && self.rules == other.rules
            && *self.setup == *other.setup
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(diagram: &str, to_move: Color) -> GameState {
        let g = Grid::from_diagram(diagram).unwrap();
        GameState::from_setup(Rules::new(g.size()), g, to_move).unwrap()
    }

    #[test]
    fn new_game_is_empty() {
        let s = GameState::new(Rules::new(9)).unwrap();
        assert_eq!(s.grid().count(None), 81);
        assert_eq!(s.to_move(), Color::Black);
        assert!(s.moves().is_empty());
        assert_eq!(s.position_hashes(), &[zobrist::empty_board_hash(9)]);
        assert!(GameState::new(Rules::new(2)).is_err());
    }

    #[test]
    fn empty_3x3_has_ten_moves() {
        let s = GameState::new(Rules::new(3)).unwrap();
        assert_eq!(s.legal_moves().unwrap().len(), 10);
    }

    #[test]
    fn capture_removes_chain() {
        let s = state(".....\n.OO..\nXO...\n.X...\n.....", Color::Black);
        let s = s.play(Vertex::at(0, 1)).unwrap();
        let s = s.play(Vertex::Pass).unwrap();
        let s = s.play(Vertex::at(0, 2)).unwrap();
        let s = s.play(Vertex::Pass).unwrap();
        let s = s.play(Vertex::at(1, 3)).unwrap();
        let s = s.play(Vertex::Pass).unwrap();
        let s = s.play(Vertex::at(2, 2)).unwrap();
        let s = s.play(Vertex::Pass).unwrap();
        assert_eq!(s.grid().count(Some(Color::White)), 3);
        let s = s.play(Vertex::at(1, 0)).unwrap();
        assert_eq!(s.grid().count(Some(Color::White)), 0);
    }

    #[test]
    fn double_pass_is_terminal() {
        let s = GameState::new(Rules::new(5)).unwrap();
        assert!(!s.is_terminal());
        let s = s.play(Vertex::Pass).unwrap().play(Vertex::Pass).unwrap();
        assert!(s.is_terminal());
        assert_eq!(s.play(Vertex::Pass).unwrap_err(), GoError::Terminal);
        assert_eq!(s.legal_moves().unwrap_err(), GoError::Terminal);
    }

    #[test]
    fn turn_limit_is_terminal() {
        let mut s = GameState::new(Rules::new(5).with_turn_limit(3)).unwrap();
        for v in [Vertex::at(0, 0), Vertex::Pass, Vertex::at(1, 1)] {
            assert!(!s.is_terminal());
            s = s.play(v).unwrap();
        }
        assert!(s.is_terminal());
    }

    #[test]
    fn distinct_errors() {
        let s = state("X....\n.....\n.....\n.....\n.....", Color::White);
        assert_eq!(s.play(Vertex::at(0, 0)).unwrap_err(), GoError::Occupied(Vertex::at(0, 0)));
        assert_eq!(s.play(Vertex::at(5, 0)).unwrap_err(), GoError::OutOfBounds(Vertex::at(5, 0)));
    }

    #[test]
    fn ko_recapture_is_superko() {
        // White captures at (1,1); Black's immediate recapture at (1,2) would
        // recreate the starting grid.
        let s = state(".XO..\nX.XO.\n.XO..\n.....\n.....", Color::White);
        let s = s.play(Vertex::at(1, 1)).unwrap();
        assert_eq!(s.grid().get(Point::new(1, 2)), None);
        assert!(!s.is_legal(Vertex::at(1, 2)));
        assert_eq!(s.play(Vertex::at(1, 2)).unwrap_err(), GoError::Superko(Vertex::at(1, 2)));
        assert!(!s.legal_moves().unwrap().contains(&Vertex::at(1, 2)));
        // After a ko threat exchange the grid differs, so the recapture is fine.
        let s = s.play(Vertex::at(4, 4)).unwrap().play(Vertex::at(4, 0)).unwrap();
        assert!(s.is_legal(Vertex::at(1, 2)));
    }

    #[test]
    fn single_stone_suicide_repeats_position() {
        let s = state(".X...\nX....\n.....\n.....\n.....", Color::White);
        // Suicide allowed, but removing the lone stone recreates the grid.
        assert_eq!(s.play(Vertex::at(0, 0)).unwrap_err(), GoError::Superko(Vertex::at(0, 0)));
        let strict = GameState::from_setup(
            Rules::new(5).with_suicide(false),
            s.grid().clone(),
            Color::White,
        )
        .unwrap();
        assert_eq!(strict.play(Vertex::at(0, 0)).unwrap_err(), GoError::Suicide(Vertex::at(0, 0)));
    }

    #[test]
    fn multi_stone_suicide_removes_chain() {
        let s = state("O.X..\nXX...\n.....\n.....\n.....", Color::White);
        let next = s.play(Vertex::at(0, 1)).unwrap();
        assert_eq!(next.grid().get(Point::new(0, 0)), None);
        assert_eq!(next.grid().get(Point::new(0, 1)), None);
        assert_eq!(next.hash(), zobrist::zobrist_hash(next.grid()));
    }

    #[test]
    fn only_pass_when_last_point_is_own_eye() {
        // Black fills the whole 3x3 board except the centre; with suicide
        // disallowed the centre would be suicide for Black.
        let s = GameState::from_setup(
            Rules::new(3).with_suicide(false),
            Grid::from_diagram("XXX\nX.X\nXXX").unwrap(),
            Color::Black,
        )
        .unwrap();
        assert_eq!(s.legal_moves().unwrap(), vec![Vertex::Pass]);
    }
}
