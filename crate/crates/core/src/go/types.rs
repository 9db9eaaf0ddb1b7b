use std::fmt;

use super::GoError;

/// Largest supported board edge.
pub const MAX_SIZE: usize = 19;
/// Smallest supported board edge.
pub const MIN_SIZE: usize = 3;
pub const MAX_CELLS: usize = MAX_SIZE * MAX_SIZE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Color::Black => 0,
            Color::White => 1,
        }
    }

    pub fn sgf_letter(self) -> char {
        match self {
            Color::Black => 'B',
            Color::White => 'W',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Black => write!(f, "black"),
            Color::White => write!(f, "white"),
        }
    }
}

/// A board coordinate. Row 0 is the top edge, column 0 the left edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub row: u8,
    pub col: u8,
}

impl Point {
    pub fn new(row: usize, col: usize) -> Point {
        Point { row: row as u8, col: col as u8 }
    }

    /// Row-major index on a board of edge `size`.
    pub fn index(self, size: usize) -> usize {
        self.row as usize * size + self.col as usize
    }

    pub fn from_index(idx: usize, size: usize) -> Point {
        Point::new(idx / size, idx % size)
    }

    pub fn manhattan(self, other: Point) -> usize {
        (self.row as isize - other.row as isize).unsigned_abs()
            + (self.col as isize - other.col as isize).unsigned_abs()
    }
}

/// A move: a stone placement or a pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    At(Point),
    Pass,
}

impl Vertex {
    pub fn at(row: usize, col: usize) -> Vertex {
        Vertex::At(Point::new(row, col))
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Vertex::Pass)
    }

    pub fn point(self) -> Option<Point> {
        match self {
            Vertex::At(p) => Some(p),
            Vertex::Pass => None,
        }
    }

    /// Move index used by policies: row-major points, then pass at `size * size`.
    pub fn index(self, size: usize) -> usize {
        match self {
            Vertex::At(p) => p.index(size),
            Vertex::Pass => size * size,
        }
    }

    pub fn from_index(idx: usize, size: usize) -> Vertex {
        if idx == size * size {
            Vertex::Pass
        } else {
            Vertex::At(Point::from_index(idx, size))
        }
    }

    /// GTP coordinate, e.g. `D4`; columns skip the letter I.
    pub fn to_gtp(self, size: usize) -> String {
        match self {
            Vertex::Pass => "pass".to_string(),
            Vertex::At(p) => {
                let letters = b"ABCDEFGHJKLMNOPQRST";
                format!("{}{}", letters[p.col as usize] as char, size - p.row as usize)
            }
        }
    }

    pub fn from_gtp(text: &str, size: usize) -> Option<Vertex> {
        let t = text.trim().to_ascii_uppercase();
        if t == "PASS" {
            return Some(Vertex::Pass);
        }
        let mut chars = t.chars();
        let letter = chars.next()?;
        if letter == 'I' {
            return None;
        }
        let letters = "ABCDEFGHJKLMNOPQRST";
        let col = letters.find(letter)?;
        let number: usize = chars.as_str().parse().ok()?;
        if col >= size || number == 0 || number > size {
            return None;
        }
        Some(Vertex::at(size - number, col))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Pass => write!(f, "pass"),
            Vertex::At(p) => write!(f, "({},{})", p.row, p.col),
        }
    }
}

/// Tromp-Taylor rule parameters. Superko is always positional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rules {
    pub board_size: usize,
    pub komi: f64,
    pub suicide_allowed: bool,
    pub turn_limit: usize,
}

impl Rules {
    /// Rules with komi 7.5, suicide allowed and a turn limit of `2 * size^2`.
    pub fn new(board_size: usize) -> Rules {
        Rules {
            board_size,
            komi: 7.5,
            suicide_allowed: true,
            turn_limit: 2 * board_size * board_size,
        }
    }

    pub fn with_komi(mut self, komi: f64) -> Rules {
        self.komi = komi;
        self
    }

    pub fn with_suicide(mut self, allowed: bool) -> Rules {
        self.suicide_allowed = allowed;
        self
    }

    pub fn with_turn_limit(mut self, limit: usize) -> Rules {
        self.turn_limit = limit;
        self
    }

    pub fn validate(&self) -> Result<(), GoError> {
        if !(MIN_SIZE..=MAX_SIZE).contains(&self.board_size) {
            return Err(GoError::InvalidRules(format!(
                "board size {} outside {MIN_SIZE}..={MAX_SIZE}",
                self.board_size
            )));
        }
        if !self.komi.is_finite() || (self.komi * 2.0).fract() != 0.0 {
            return Err(GoError::InvalidRules(format!(
                "komi {} is not a multiple of 0.5",
                self.komi
            )));
        }
        if self.turn_limit == 0 {
            return Err(GoError::InvalidRules("turn limit must be positive".into()));
        }
        Ok(())
    }
}

impl Default for Rules {
    fn default() -> Self {
        Rules::new(9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gtp_coordinates_skip_i() {
        assert_eq!(Vertex::at(0, 8).to_gtp(9), "J9");
        assert_eq!(Vertex::at(8, 0).to_gtp(9), "A1");
        assert_eq!(Vertex::from_gtp("j9", 9), Some(Vertex::at(0, 8)));
        assert_eq!(Vertex::from_gtp("I5", 9), None);
        assert_eq!(Vertex::from_gtp("A10", 9), None);
        assert_eq!(Vertex::from_gtp("PASS", 9), Some(Vertex::Pass));
    }

    #[test]
    fn opponent_is_involutive() {
        for c in [Color::Black, Color::White] {
            assert_ne!(c.opponent(), c);
            assert_eq!(c.opponent().opponent(), c);
        }
    }

    #[test]
    fn rules_validation() {
        assert!(Rules::new(9).validate().is_ok());
        assert!(Rules::new(2).validate().is_err());
        assert!(Rules::new(20).validate().is_err());
        assert!(Rules::new(9).with_komi(7.25).validate().is_err());
        assert!(Rules::new(9).with_komi(-3.0).validate().is_ok());
        assert!(Rules::new(9).with_turn_limit(0).validate().is_err());
    }
}
