//! Hard-coded baseline attackers: Edge, Spiral and Mirror Go.

use rand::{Rng, RngCore};

use crate::arena::{Agent, AgentError, MoveDecision};
use crate::go::{GameState, Point, Vertex};

/// ℓ∞ ring of a point: 0 on the border, increasing inward.
pub fn ring_of(p: Point, n: usize) -> usize {
    let (r, c) = (p.row as usize, p.col as usize);
    r.min(c).min(n - 1 - r).min(n - 1 - c)
}

/// Uniform legal placement in the outermost ring that has one; Pass if no
/// placement is legal.
pub fn edge_move<R: Rng + ?Sized>(state: &GameState, rng: &mut R) -> Vertex {
    let n = state.size();
    let Ok(moves) = state.legal_moves() else {
        return Vertex::Pass;
    };
    let placements: Vec<Point> = moves.iter().filter_map(|v| v.point()).collect();
    let Some(outer) = placements.iter().map(|&p| ring_of(p, n)).min() else {
        return Vertex::Pass;
    };
    let ring: Vec<Point> = placements.into_iter().filter(|&p| ring_of(p, n) == outer).collect();
    Vertex::At(ring[rng.random_range(0..ring.len())])
}

/// Every vertex in spiral order: rings from the border inward, each ring
/// walked counterclockwise starting at its bottom-left corner (row 0 is the
/// top row, so "up" means decreasing row).
pub fn spiral_order(n: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(n * n);
    for d in 0..n.div_ceil(2) {
        let (lo, hi) = (d, n - 1 - d);
        if lo == hi {
            out.push(Point::new(lo, lo));
            break;
        }
        for c in lo..hi {
            out.push(Point::new(hi, c)); // bottom edge, rightwards
        }
        for r in (lo + 1..=hi).rev() {
            out.push(Point::new(r, hi)); // right edge, upwards
        }
        for c in (lo + 1..=hi).rev() {
            out.push(Point::new(lo, c)); // top edge, leftwards
        }
        for r in lo..hi {
            out.push(Point::new(r, lo)); // left edge, downwards
        }
    }
    out
}

/// Nearest legal placement to `target` by ℓ¹ distance, ties broken by
/// smaller row, then smaller column.
pub fn nearest_legal(state: &GameState, target: Point) -> Option<Point> {
    let moves = state.legal_moves().ok()?;
    moves
        .iter()
        .filter_map(|v| v.point())
        .min_by_key(|&p| (p.manhattan(target), p.row, p.col))
}

/// Mirror Go's intended reply to the opponent's last move: reflection in
/// the main diagonal, or in the anti-diagonal for moves on the main
/// diagonal. `None` stands for Pass.
pub fn mirror_target(last: Vertex, n: usize) -> Option<Point> {
    let p = last.point()?;
    let (r, c) = (p.row as usize, p.col as usize);
    Some(if r == c { Point::new(n - 1 - c, n - 1 - r) } else { Point::new(c, r) })
}

pub fn mirror_move(state: &GameState) -> Vertex {
    let n = state.size();
    let target = match state.last_move() {
        Some((_, v)) => match mirror_target(v, n) {
            Some(t) => t,
            None => return Vertex::Pass,
        },
        None => Point::new(n / 2, n / 2),
    };
    if state.is_legal(Vertex::At(target)) {
        return Vertex::At(target);
    }
    nearest_legal(state, target).map_or(Vertex::Pass, Vertex::At)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    Edge,
    Spiral,
    Mirror,
}

/// A baseline attacker. Spiral keeps a per-game cursor into the traversal.
#[derive(Clone, Debug)]
pub struct BaselineAgent {
    pub kind: BaselineKind,
    cursor: usize,
}

impl BaselineAgent {
    pub fn new(kind: BaselineKind) -> BaselineAgent {
        BaselineAgent { kind, cursor: 0 }
    }

    fn spiral_move(&mut self, state: &GameState) -> Vertex {
        let order = spiral_order(state.size());
        while self.cursor < order.len() {
            let v = Vertex::At(order[self.cursor]);
            self.cursor += 1;
            if state.is_legal(v) {
                return v;
            }
        }
        Vertex::Pass
    }
}

impl Agent for BaselineAgent {
    fn name(&self) -> String {
        match self.kind {
            BaselineKind::Edge => "edge",
            BaselineKind::Spiral => "spiral",
            BaselineKind::Mirror => "mirror",
        }
        .to_string()
    }

    fn new_game(&mut self) {
        self.cursor = 0;
    }

    fn select_move(&mut self, state: &GameState, rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        let mv = match self.kind {
            BaselineKind::Edge => edge_move(state, rng),
            BaselineKind::Spiral => self.spiral_move(state),
            BaselineKind::Mirror => mirror_move(state),
        };
        Ok(MoveDecision::plain(mv))
    }
}
