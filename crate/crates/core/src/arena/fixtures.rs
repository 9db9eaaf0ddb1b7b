//! Hand-crafted positions where one side wins by a simple long-horizon plan,
//! and the scripted agent that executes the plan.
//!
//! Each fixture has Black walls built from two-stone-wide column segments
//! separated by gaps of two side-by-side empty points (bamboo joints), and a
//! large eyeless White group on the right whose only liberties lie in the
//! gaps of the rightmost wall. Black to move wins by answering every White
//! intrusion into a joint with the other point of that joint, connecting
//! the remaining joints, and then filling the White group's liberties. If
//! Black passes immediately instead, White wins on area.

use rand::RngCore;

use super::agents::{Agent, AgentError, MoveDecision};
use crate::go::{from_sgf, Color, GameState, Grid, Point, Rules, SgfError, Vertex};
use crate::mcts::Evaluator;
use crate::victim_play::GameRecord;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?} (known: {known})", known = FIXTURE_NAMES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Sgf(#[from] SgfError),
}

pub const FIXTURE_NAMES: [&str; 3] = ["columns-7", "columns-9", "columns-19"];

const COLUMNS_7: &str = include_str!("../../fixtures/columns-7.sgf");
const COLUMNS_9: &str = include_str!("../../fixtures/columns-9.sgf");
const COLUMNS_19: &str = include_str!("../../fixtures/columns-19.sgf");

/// Description of a column-wall position.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnLayout {
    pub size: usize,
    /// Left column of each two-wide Black wall; the last one borders White.
    pub walls: Vec<usize>,
    /// Rows left empty in every wall (the joints).
    pub gap_rows: Vec<usize>,
}

impl ColumnLayout {
    pub fn grid(&self) -> Grid {
        let n = self.size;
        let mut g = Grid::new(n);
        let last = *self.walls.last().expect("at least one wall");
        for &w in &self.walls {
            for r in 0..n {
                if !self.gap_rows.contains(&r) {
                    g.set(Point::new(r, w), Some(Color::Black));
                    g.set(Point::new(r, w + 1), Some(Color::Black));
                }
            }
        }
        for r in 0..n {
            for c in last + 2..n {
                g.set(Point::new(r, c), Some(Color::White));
            }
        }
        g
    }

    pub fn state(&self) -> GameState {
        GameState::from_setup(Rules::new(self.size), self.grid(), Color::Black).expect("valid fixture layout")
    }
}

/// Layouts the shipped fixtures were generated from.
pub fn fixture_layout(name: &str) -> Option<ColumnLayout> {
    match name {
        "columns-7" => Some(ColumnLayout { size: 7, walls: vec![3], gap_rows: vec![2, 4] }),
        "columns-9" => Some(ColumnLayout { size: 9, walls: vec![4], gap_rows: vec![1, 4, 7] }),
        // Approximate 19x19 reconstruction: several disconnected Black
        // columns and a large White group on the right edge.
        "columns-19" => Some(ColumnLayout { size: 19, walls: vec![4, 10], gap_rows: vec![2, 6, 10, 14, 17] }),
        _ => None,
    }
}

/// Load a shipped fixture by name.
pub fn load_fixture(name: &str) -> Result<GameState, FixtureError> {
    let text = match name {
        "columns-7" => COLUMNS_7,
        "columns-9" => COLUMNS_9,
        "columns-19" => COLUMNS_19,
        _ => return Err(FixtureError::Unknown(name.to_string())),
    };
    Ok(from_sgf(text)?)
}

/// Chain id per point for stones of `color` (`usize::MAX` elsewhere).
fn chain_ids(grid: &Grid, color: Color) -> Vec<usize> {
    let n = grid.size();
    let mut ids = vec![usize::MAX; n * n];
    let mut next = 0;
    for i in 0..n * n {
        if grid.get_index(i) == Some(color) && ids[i] == usize::MAX {
            let (stones, _) = grid.chain_at(i);
            for s in stones {
                ids[s] = next;
            }
            next += 1;
        }
    }
    ids
}

/// Empty points adjacent to at least two different `color` chains, with
/// the set of chains each one joins.
fn connection_points(grid: &Grid, color: Color) -> Vec<(usize, Vec<usize>)> {
    let ids = chain_ids(grid, color);
    let mut out = Vec::new();
    for i in 0..grid.area() {
        if grid.get_index(i).is_some() {
            continue;
        }
        let mut joined: Vec<usize> = grid.neighbors(i).map(|j| ids[j]).filter(|&c| c != usize::MAX).collect();
        joined.sort_unstable();
        joined.dedup();
        if joined.len() >= 2 {
            out.push((i, joined));
        }
    }
    out
}

/// Black's scripted plan for the column fixtures (works for either colour).
///
/// 1. If the opponent just took one point of a joint whose partner point is
///    still open, take the partner.
/// 2. Otherwise play any point that joins two of our chains.
/// 3. Once everything is connected, fill a liberty of the opponent chain
///    with the fewest liberties, avoiding self-atari.
/// 4. Pass when no opponent stones remain.
#[derive(Clone, Debug, Default)]
pub struct ConnectorAgent;

pub fn connector_move(state: &GameState) -> Vertex {
    let me = state.to_move();
    let grid = state.grid();
    let n = state.size();
    let legal = |i: usize| state.is_legal(Vertex::from_index(i, n));
    let points = connection_points(grid, me);
    if let Some((_, Vertex::At(last))) = state.last_move() {
        // The opponent took one point of a joint: its partner is a
        // neighbouring point that still joins our chains.
        let li = last.index(n);
        let near: Vec<usize> = grid.neighbors(li).collect();
        let mut urgent: Vec<usize> = points
            .iter()
            .filter(|(i, _)| near.contains(i))
            .map(|(i, _)| *i)
            .filter(|&i| legal(i))
            .collect();
        urgent.sort_by_key(|&i| Point::from_index(i, n).manhattan(last));
        if let Some(&i) = urgent.first() {
            return Vertex::from_index(i, n);
        }
    }
    if let Some((i, _)) = points.iter().find(|(i, _)| legal(*i)) {
        return Vertex::from_index(*i, n);
    }
    // Capture phase.
    let opp = me.opponent();
    let ids = chain_ids(grid, opp);
    let mut chains: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for i in 0..grid.area() {
        if ids[i] != usize::MAX && seen.insert(ids[i]) {
            let (stones, _) = grid.chain_at(i);
            let mut libs: Vec<usize> = stones
                .iter()
                .flat_map(|&s| grid.neighbors(s))
                .filter(|&j| grid.get_index(j).is_none())
                .collect();
            libs.sort_unstable();
            libs.dedup();
            chains.push((libs.len(), libs));
        }
    }
    chains.sort_by_key(|(k, libs)| (*k, libs.first().copied()));
    for (_, libs) in &chains {
        for &l in libs {
            if !legal(l) {
                continue;
            }
            let after = state.play(Vertex::from_index(l, n)).expect("legal");
            let captured = after.grid().count(Some(opp)) < grid.count(Some(opp));
            // Suicide leaves the point empty.
            let own_libs = if after.grid().get_index(l).is_some() { after.grid().chain_at(l).1 } else { 0 };
            if captured || own_libs >= 2 {
                return Vertex::from_index(l, n);
            }
        }
    }
    Vertex::Pass
}

impl Agent for ConnectorAgent {
    fn name(&self) -> String {
        "connector".into()
    }

    fn select_move(&mut self, state: &GameState, _rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        Ok(MoveDecision::plain(connector_move(state)))
    }
}

/// Fills one empty point between two opponent chains each turn (the
/// cutting "challenge" the connector must answer); passes otherwise.
#[derive(Clone, Debug, Default)]
pub struct GapFillerAgent;

impl Agent for GapFillerAgent {
    fn name(&self) -> String {
        "gap-filler".into()
    }

    fn select_move(&mut self, state: &GameState, _rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        let n = state.size();
        let points = connection_points(state.grid(), state.to_move().opponent());
        let mv = points
            .iter()
            .map(|(i, _)| Vertex::from_index(*i, n))
            .find(|&v| state.is_legal(v))
            .unwrap_or(Vertex::Pass);
        Ok(MoveDecision::plain(mv))
    }
}

/// Victim value at one position of a game.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuePoint {
    pub move_number: usize,
    pub to_move: Color,
    /// Evaluator value from the side to move's perspective.
    pub value: f64,
    /// Whether the side to move would lose if both players passed now.
    pub loses_on_double_pass: bool,
    /// Value above the confidence threshold while a double pass would lose.
    pub flagged: bool,
}

/// Evaluate every position of `record` where `victim` is to move (every
/// position when `victim` is `None`), flagging confident-but-losing ones.
pub fn analyze_game(
    record: &GameRecord,
    evaluator: &dyn Evaluator,
    victim: Option<Color>,
    threshold: f64,
) -> Result<Vec<ValuePoint>, AgentError> {
    let mut s = GameState::from_setup(record.rules, record.setup.clone(), record.first_to_move)?;
    let mut out = Vec::new();
    for k in 0..=record.moves.len() {
        if !s.is_terminal() && victim.is_none_or(|c| c == s.to_move()) {
            let legal = s.legal_mask()?;
            let r = evaluator.evaluate(&s, &legal)?;
            let mover = s.to_move();
            let score = crate::go::score_grid(s.grid(), record.rules.komi);
            let loses = score.winner.value_for(mover) < 0.0;
            out.push(ValuePoint {
                move_number: k,
                to_move: mover,
                value: r.value,
                loses_on_double_pass: loses,
                flagged: loses && super::agents::is_confident(r.value, threshold),
            });
        }
        if k < record.moves.len() {
            s = s.play(record.moves[k].mv)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{play_game, RandomAgent};
    use crate::go::{score_tromp_taylor, to_sgf};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shipped_fixtures_match_their_layouts_and_round_trip() {
        for name in FIXTURE_NAMES {
            let s = load_fixture(name).unwrap();
            let layout = fixture_layout(name).unwrap();
            assert_eq!(s.grid(), &layout.grid(), "{name}");
            assert_eq!(s.to_move(), Color::Black);
            assert_eq!(from_sgf(&to_sgf(&s)).unwrap(), s);
            // Passing now loses for Black.
            assert_eq!(crate::go::score_grid(s.grid(), 7.5).winner.color(), Some(Color::White), "{name}");
        }
        assert!(matches!(load_fixture("nope"), Err(FixtureError::Unknown(_))));
    }

    #[test]
    fn connector_beats_gap_filler() {
        for name in FIXTURE_NAMES {
            let s = load_fixture(name).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut r2 = ChaCha8Rng::seed_from_u64(1);
            let rec = play_game(&mut ConnectorAgent, &mut GapFillerAgent, &s, &mut rng, &mut r2).unwrap();
            assert_eq!(rec.score.winner.color(), Some(Color::Black), "{name}: {}", rec.score);
            assert_eq!(score_tromp_taylor(&rec.replay().unwrap()), rec.score);
        }
    }

    #[test]
    fn connector_beats_random_on_small_fixture() {
        let s = load_fixture("columns-7").unwrap();
        for g in 0..20u64 {
            let mut r1 = ChaCha8Rng::seed_from_u64(g);
            let mut r2 = ChaCha8Rng::seed_from_u64(1000 + g);
            let rec = play_game(&mut ConnectorAgent, &mut RandomAgent, &s, &mut r1, &mut r2).unwrap();
            assert_eq!(rec.score.winner.color(), Some(Color::Black), "game {g}: {}", rec.score);
        }
    }
}
