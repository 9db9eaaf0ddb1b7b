use std::fmt;

use super::types::{Color, Point, MAX_CELLS};
use super::zobrist;

/// Board contents: one optional stone per vertex, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    size: u8,
    cells: [Option<Color>; MAX_CELLS],
}

/// Outcome of placing a stone on a grid (no legality checks beyond occupancy).
#[derive(Clone, Debug)]
pub struct Placement {
    pub grid: Grid,
    pub hash: u64,
    pub captured: usize,
    /// The placed stone's chain had no liberties after captures and was removed.
    pub suicide: bool,
    /// Stones removed by that suicide (including the placed stone).
    pub suicided: usize,
}

impl Grid {
    pub fn new(size: usize) -> Grid {
        Grid { size: size as u8, cells: [None; MAX_CELLS] }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size as usize
    }

    #[inline]
    pub fn area(&self) -> usize {
        self.size() * self.size()
    }

    #[inline]
    pub fn get(&self, p: Point) -> Option<Color> {
        self.cells[p.index(self.size())]
    }

    #[inline]
    pub fn get_index(&self, idx: usize) -> Option<Color> {
        self.cells[idx]
    }

    #[inline]
    pub fn set_index(&mut self, idx: usize, c: Option<Color>) {
        self.cells[idx] = c;
    }

    pub fn set(&mut self, p: Point, c: Option<Color>) {
        let n = self.size();
        self.cells[p.index(n)] = c;
    }

    pub fn cells(&self) -> &[Option<Color>] {
        &self.cells[..self.area()]
    }

    pub fn count(&self, c: Option<Color>) -> usize {
        self.cells().iter().filter(|&&x| x == c).count()
    }

    /// Orthogonal neighbours of a row-major index.
    #[inline]
    pub fn neighbors(&self, idx: usize) -> Neighbors {
        neighbors(idx, self.size())
    }

    /// Chain containing `idx` (which must hold a stone) and its liberty count.
    pub fn chain_at(&self, idx: usize) -> (Vec<usize>, usize) {
        let color = self.cells[idx];
        debug_assert!(color.is_some());
        let mut seen = [false; MAX_CELLS];
        let mut lib_seen = [false; MAX_CELLS];
        let mut stack = vec![idx];
        let mut chain = Vec::new();
        let mut libs = 0;
        seen[idx] = true;
        while let Some(v) = stack.pop() {
            chain.push(v);
            for nb in self.neighbors(v) {
                match self.cells[nb] {
                    None => {
                        if !lib_seen[nb] {
                            lib_seen[nb] = true;
                            libs += 1;
                        }
                    }
                    c if c == color && !seen[nb] => {
                        seen[nb] = true;
                        stack.push(nb);
                    }
                    _ => {}
                }
            }
        }
        (chain, libs)
    }

    fn has_liberty(&self, idx: usize, seen: &mut [bool; MAX_CELLS]) -> bool {
        let color = self.cells[idx];
        let mut stack = vec![idx];
        seen[idx] = true;
        let mut found = false;
        while let Some(v) = stack.pop() {
            for nb in self.neighbors(v) {
                match self.cells[nb] {
                    None => found = true,
                    c if c == color && !seen[nb] => {
                        seen[nb] = true;
                        stack.push(nb);
                    }
                    _ => {}
                }
            }
        }
        found
    }

    fn remove_chain(&mut self, idx: usize, hash: &mut u64) -> usize {
        let color = self.cells[idx].expect("chain removal on empty point");
        let n = self.size();
        let mut stack = vec![idx];
        self.cells[idx] = None;
        *hash ^= zobrist::stone_key(color, idx / n, idx % n);
        let mut removed = 0;
        while let Some(v) = stack.pop() {
            removed += 1;
            for nb in neighbors(v, n) {
                if self.cells[nb] == Some(color) {
                    self.cells[nb] = None;
                    *hash ^= zobrist::stone_key(color, nb / n, nb % n);
                    stack.push(nb);
                }
            }
        }
        removed
    }

    /// Place `color` at empty `idx`, removing libertyless opponent chains first
    /// and then the placed chain if it has no liberties left.
    pub fn place(&self, idx: usize, color: Color, hash: u64) -> Placement {
        debug_assert!(self.cells[idx].is_none());
        let n = self.size();
        let mut grid = self.clone();
        let mut hash = hash ^ zobrist::stone_key(color, idx / n, idx % n);
        grid.cells[idx] = Some(color);
        let opp = Some(color.opponent());
        let mut captured = 0;
        for nb in neighbors(idx, n) {
            if grid.cells[nb] == opp {
                let mut seen = [false; MAX_CELLS];
                if !grid.has_liberty(nb, &mut seen) {
                    captured += grid.remove_chain(nb, &mut hash);
                }
            }
        }
        let mut seen = [false; MAX_CELLS];
        let (suicide, suicided) = if grid.has_liberty(idx, &mut seen) {
            (false, 0)
        } else {
            (true, grid.remove_chain(idx, &mut hash))
        };
        Placement { grid, hash, captured, suicide, suicided }
    }

    /// True iff no chain on the grid is without liberties.
    pub fn all_chains_have_liberties(&self) -> bool {
        let mut seen = [false; MAX_CELLS];
        for idx in 0..self.area() {
            if self.cells[idx].is_some() && !seen[idx] && !self.has_liberty(idx, &mut seen) {
                return false;
            }
        }
        true
    }

    /// Parse an X/O/. diagram (one row per line, whitespace ignored).
    pub fn from_diagram(text: &str) -> Option<Grid> {
        let rows: Vec<Vec<Option<Color>>> = text
            .lines()
            .map(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<String>())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .map(|c| match c {
                        'X' | 'x' | 'B' => Some(Some(Color::Black)),
                        'O' | 'o' | 'W' => Some(Some(Color::White)),
                        '.' | '+' => Some(None),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<_>>()?;
        let n = rows.len();
        if !(super::types::MIN_SIZE..=super::types::MAX_SIZE).contains(&n)
            || rows.iter().any(|r| r.len() != n)
        {
            return None;
        }
        let mut g = Grid::new(n);
        for (r, row) in rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                g.cells[r * n + c] = *cell;
            }
        }
        Some(g)
    }

    /// Diagram with `X` for Black, `O` for White and `.` for empty.
    pub fn diagram(&self) -> String {
        let n = self.size();
        let mut s = String::with_capacity(n * (n + 1));
        for r in 0..n {
            for c in 0..n {
                s.push(cell_char(self.cells[r * n + c]));
            }
            s.push('\n');
        }
        s
    }

    /// Diagram with GTP-style coordinates and an optional per-point marker.
    pub fn diagram_with(&self, mut mark: impl FnMut(usize) -> Option<char>) -> String {
        let n = self.size();
        let letters = b"ABCDEFGHJKLMNOPQRST";
        let mut s = String::from("   ");
        for c in 0..n {
            s.push(letters[c] as char);
            s.push(' ');
        }
        s.push('\n');
        for r in 0..n {
            s.push_str(&format!("{:>2} ", n - r));
            for c in 0..n {
                let idx = r * n + c;
                s.push(mark(idx).unwrap_or_else(|| cell_char(self.cells[idx])));
                s.push(' ');
            }
            s.push('\n');
        }
        s
    }
}

fn cell_char(c: Option<Color>) -> char {
    match c {
        Some(Color::Black) => 'X',
        Some(Color::White) => 'O',
        None => '.',
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid {}x{}\n{}", self.size, self.size, self.diagram())
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.diagram_with(|_| None))
    }
}

/// Up to four orthogonal neighbours.
#[derive(Clone, Copy)]
pub struct Neighbors {
    buf: [usize; 4],
    len: u8,
    pos: u8,
}

impl Iterator for Neighbors {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.pos < self.len {
            self.pos += 1;
            Some(self.buf[self.pos as usize - 1])
        } else {
            None
        }
    }
}

#[inline]
pub fn neighbors(idx: usize, n: usize) -> Neighbors {
    let (r, c) = (idx / n, idx % n);
    let mut nb = Neighbors { buf: [0; 4], len: 0, pos: 0 };
    let mut push = |v: usize| {
        nb.buf[nb.len as usize] = v;
        nb.len += 1;
    };
    if r > 0 {
        push(idx - n);
    }
    if r + 1 < n {
        push(idx + n);
    }
    if c > 0 {
        push(idx - 1);
    }
    if c + 1 < n {
        push(idx + 1);
    }
    nb
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagram_round_trip() {
        let text = "X.O\n.X.\nO..\n";
        let g = Grid::from_diagram(text).unwrap();
        assert_eq!(g.diagram(), text);
        assert_eq!(g.count(Some(Color::Black)), 2);
    }

    #[test]
    fn corner_has_two_neighbors() {
        assert_eq!(neighbors(0, 5).count(), 2);
        assert_eq!(neighbors(12, 5).count(), 4);
        assert_eq!(neighbors(4, 5).count(), 2);
        assert_eq!(neighbors(2, 5).count(), 3);
    }

    #[test]
    fn capture_before_suicide() {
        // Black at (0,1) captures the white corner stone even though it has no
        // liberties of its own before the capture.
        let g = Grid::from_diagram("O.X\nX..\n...").unwrap();
        let h = zobrist::zobrist_hash(&g);
        let p = g.place(1, Color::Black, h);
        assert_eq!(p.captured, 1);
        assert!(!p.suicide);
        assert_eq!(p.grid.get_index(0), None);
        assert_eq!(p.hash, zobrist::zobrist_hash(&p.grid));
    }
}
