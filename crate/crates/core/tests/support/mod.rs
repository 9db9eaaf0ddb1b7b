//! Independent oracles shared by the integration and acceptance suites. Nothing
//! here calls into the library code paths it is used to check, except the
//! gradient checker, which differentiates the library loss numerically.
#![allow(dead_code)]

pub mod gradients;

use std::collections::HashSet;

use advgo::go::{Color, Grid, Rules, Vertex};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const BLACK: u8 = 1;
pub const WHITE: u8 = 2;

/// Plain-array board used by the oracles.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Board {
    pub n: usize,
    pub cells: Vec<u8>,
}

impl Board {
    pub fn from_grid(g: &Grid) -> Board {
        let cells = g
            .cells()
            .iter()
            .map(|c| match c {
                None => 0,
                Some(Color::Black) => BLACK,
                Some(Color::White) => WHITE,
            })
            .collect();
        Board { n: g.size(), cells }
    }

    pub fn to_grid(&self) -> Grid {
        let mut g = Grid::new(self.n);
        for (i, &c) in self.cells.iter().enumerate() {
            g.set_index(
                i,
                match c {
                    BLACK => Some(Color::Black),
                    WHITE => Some(Color::White),
                    _ => None,
                },
            );
        }
        g
    }

    pub fn adj(&self, i: usize) -> Vec<usize> {
        let n = self.n as isize;
        let (r, c) = ((i / self.n) as isize, (i % self.n) as isize);
        [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
            .into_iter()
            .filter(|&(a, b)| a >= 0 && b >= 0 && a < n && b < n)
            .map(|(a, b)| (a * n + b) as usize)
            .collect()
    }

    /// Connected same-colour group containing `i` (BFS).
    pub fn group(&self, i: usize) -> Vec<usize> {
        let col = self.cells[i];
        let mut seen = vec![false; self.cells.len()];
        let mut out = vec![i];
        seen[i] = true;
        let mut k = 0;
        while k < out.len() {
            let v = out[k];
            k += 1;
            for w in self.adj(v) {
                if !seen[w] && self.cells[w] == col {
                    seen[w] = true;
                    out.push(w);
                }
            }
        }
        out
    }

    pub fn liberties(&self, group: &[usize]) -> usize {
        let mut libs = HashSet::new();
        for &v in group {
            for w in self.adj(v) {
                if self.cells[w] == 0 {
                    libs.insert(w);
                }
            }
        }
        libs.len()
    }

    pub fn legal_position(&self) -> bool {
        (0..self.cells.len()).all(|i| self.cells[i] == 0 || self.liberties(&self.group(i)) > 0)
    }

    /// Tromp-Taylor move: captures first, then own libertyless group removed.
    pub fn play(&mut self, i: usize, col: u8) {
        let opp = 3 - col;
        self.cells[i] = col;
        for w in self.adj(i) {
            if self.cells[w] == opp {
                let g = self.group(w);
                if self.liberties(&g) == 0 {
                    for v in g {
                        self.cells[v] = 0;
                    }
                }
            }
        }
        let g = self.group(i);
        if self.liberties(&g) == 0 {
            for v in g {
                self.cells[v] = 0;
            }
        }
    }
}

/// Every legal position of an n×n board (all groups have a liberty).
pub fn all_legal_grids(n: usize) -> Vec<Grid> {
    let cells = n * n;
    let total = 3usize.pow(cells as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut b = Board { n, cells: vec![0; cells] };
        for i in 0..cells {
            b.cells[i] = (c % 3) as u8;
            c /= 3;
        }
        if b.legal_position() {
            out.push(b.to_grid());
        }
    }
    out
}

/// Random legal grid with the given empty-point probability.
pub fn random_grid(n: usize, p_empty: f64, rng: &mut impl Rng) -> Grid {
    loop {
        let cells = (0..n * n)
            .map(|_| {
                if rng.random_bool(p_empty) {
                    0
                } else if rng.random_bool(0.5) {
                    BLACK
                } else {
                    WHITE
                }
            })
            .collect();
        let b = Board { n, cells };
        if b.legal_position() {
            return b.to_grid();
        }
    }
}

/// Final grid of a random game in which neither side fills its own
/// single-point eyes, so the result tends to contain living groups.
pub fn random_playout_grid(n: usize, rng: &mut impl Rng) -> Grid {
    let mut b = Board { n, cells: vec![0; n * n] };
    let mut seen = HashSet::new();
    seen.insert(b.cells.clone());
    let mut col = BLACK;
    let mut passes = 0;
    for _ in 0..4 * n * n {
        let mut options = Vec::new();
        for i in 0..n * n {
            if b.cells[i] != 0 {
                continue;
            }
            if b.adj(i).iter().all(|&w| b.cells[w] == col) {
                continue;
            }
            let mut t = b.clone();
            t.play(i, col);
            if t.cells[i] == col && !seen.contains(&t.cells) {
                options.push((i, t));
            }
        }
        if let Some((_, t)) = options.choose(rng) {
            b = t.clone();
            seen.insert(b.cells.clone());
            passes = 0;
        } else {
            passes += 1;
            if passes == 2 {
                break;
            }
        }
        col = 3 - col;
    }
    b.to_grid()
}

// ---------------------------------------------------------------------------
// Scoring oracle: reachability by repeated relaxation rather than flood fill
// of regions.

pub fn oracle_score(g: &Grid, komi: f64) -> (f64, f64) {
    let b = Board::from_grid(g);
    let len = b.cells.len();
    let mut reach = [vec![false; len], vec![false; len]];
    for (k, col) in [BLACK, WHITE].into_iter().enumerate() {
        for i in 0..len {
            reach[k][i] = b.cells[i] == col;
        }
        loop {
            let mut changed = false;
            for i in 0..len {
                if !reach[k][i] && b.cells[i] == 0 && b.adj(i).iter().any(|&w| reach[k][w]) {
                    reach[k][i] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    let mut black = 0.0;
    let mut white = komi;
    for i in 0..len {
        match b.cells[i] {
            BLACK => black += 1.0,
            WHITE => white += 1.0,
            _ => match (reach[0][i], reach[1][i]) {
                (true, false) => black += 1.0,
                (false, true) => white += 1.0,
                _ => {}
            },
        }
    }
    (black, white)
}

// ---------------------------------------------------------------------------
// Pass-alive oracle: exhaustive search over every sequence of attacker moves
// while the defender passes. Attacker moves may fill any empty point; a
// placed stone whose group ends up libertyless after captures is removed,
// except that a lone stone doing so is not allowed.

/// Per-point flag: stone of `defender` belongs to a chain that no attacker
/// sequence can empty.
pub fn oracle_pass_alive(g: &Grid, defender: Color) -> Vec<bool> {
    let start = Board::from_grid(g);
    let d = if defender == Color::Black { BLACK } else { WHITE };
    let a = 3 - d;
    let len = start.cells.len();
    assert!(len <= 32);

    let mut chains: Vec<u32> = Vec::new();
    let mut done = vec![false; len];
    for i in 0..len {
        if start.cells[i] == d && !done[i] {
            let mut m = 0u32;
            for v in start.group(i) {
                done[v] = true;
                m |= 1 << v;
            }
            chains.push(m);
        }
    }
    let mut captured = vec![false; chains.len()];
    let mut remaining = chains.len();

    let key = |b: &Board| -> u64 {
        let mut dm = 0u64;
        let mut am = 0u64;
        for (i, &c) in b.cells.iter().enumerate() {
            if c == d {
                dm |= 1 << i;
            } else if c == a {
                am |= 1 << i;
            }
        }
        dm << 32 | am
    };

    let mut seen = HashSet::new();
    seen.insert(key(&start));
    let mut stack = vec![start];
    while let Some(b) = stack.pop() {
        if remaining == 0 {
            break;
        }
        for i in 0..len {
            if b.cells[i] != 0 {
                continue;
            }
            let mut t = b.clone();
            t.cells[i] = a;
            let mut any_capture = false;
            for w in t.adj(i) {
                if t.cells[w] == d {
                    let grp = t.group(w);
                    if t.liberties(&grp) == 0 {
                        any_capture = true;
                        for v in grp {
                            t.cells[v] = 0;
                        }
                    }
                }
            }
            let own = t.group(i);
            if t.liberties(&own) == 0 {
                if own.len() == 1 {
                    continue;
                }
                for v in own {
                    t.cells[v] = 0;
                }
            }
            if any_capture {
                for (k, &m) in chains.iter().enumerate() {
                    if !captured[k] && (0..len).all(|v| m & (1 << v) == 0 || t.cells[v] != d) {
                        captured[k] = true;
                        remaining -= 1;
                    }
                }
            }
            if seen.insert(key(&t)) {
                stack.push(t);
            }
        }
    }

    let mut out = vec![false; len];
    for (k, &m) in chains.iter().enumerate() {
        if !captured[k] {
            for v in 0..len {
                if m & (1 << v) != 0 {
                    out[v] = true;
                }
            }
        }
    }
    out
}

/// Literal check of the pass-alive-territory definition given a pass-alive
/// stone mask for `color`.
pub fn oracle_territory(g: &Grid, color: Color, alive: &[bool]) -> Vec<bool> {
    let b = Board::from_grid(g);
    let c = if color == Color::Black { BLACK } else { WHITE };
    let len = b.cells.len();
    let mut out = vec![false; len];
    let mut seen = vec![false; len];
    for s in 0..len {
        if b.cells[s] == c || seen[s] {
            continue;
        }
        // Maximal non-`color` region containing s.
        let mut region = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < region.len() {
            let v = region[k];
            k += 1;
            for w in b.adj(v) {
                if b.cells[w] != c && !seen[w] {
                    seen[w] = true;
                    region.push(w);
                }
            }
        }
        let bordering_all_alive = region
            .iter()
            .flat_map(|&v| b.adj(v))
            .filter(|&w| b.cells[w] == c)
            .all(|w| alive[w]);
        let not_adjacent = region
            .iter()
            .filter(|&&v| !b.adj(v).iter().any(|&w| b.cells[w] == c && alive[w]))
            .count();
        if bordering_all_alive && not_adjacent <= 1 {
            for &v in &region {
                out[v] = true;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Replay oracle.

/// Re-simulate a move list from an empty board with the oracle board.
pub fn replay_cells(rules: &Rules, moves: &[(Color, Vertex)]) -> Vec<u8> {
    let n = rules.board_size;
    let mut b = Board { n, cells: vec![0; n * n] };
    for &(col, v) in moves {
        if let Vertex::At(p) = v {
            let c = if col == Color::Black { BLACK } else { WHITE };
            b.play(p.row as usize * n + p.col as usize, c);
        }
    }
    b.cells
}
