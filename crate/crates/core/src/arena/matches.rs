use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::agents::{Agent, AgentError};
use super::stats::{clopper_pearson_fractional, StatsError};
use crate::go::{score_tromp_taylor, Color, GameState, Rules};
use crate::victim_play::{GameRecord, MoveInfo};

/// Builds a fresh agent for every game so games can run in parallel.
pub trait AgentFactory: Sync {
    fn build(&self) -> Result<Box<dyn Agent>, AgentError>;
}

impl<F> AgentFactory for F
where
    F: Fn() -> Result<Box<dyn Agent>, AgentError> + Sync,
{
    fn build(&self) -> Result<Box<dyn Agent>, AgentError> {
        self()
    }
}

/// Per-game RNG stream for an agent: the agent's seed, stream = game index.
pub fn game_rng(seed: u64, game: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(game);
    rng
}

/// Derive a sub-seed from a master seed and a label (SplitMix64 mixing).
pub fn derive_seed(master: u64, label: u64) -> u64 {
    let mut z = master ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Play one game from `start` to the end.
pub fn play_game(
    black: &mut dyn Agent,
    white: &mut dyn Agent,
    start: &GameState,
    rng_black: &mut dyn RngCore,
    rng_white: &mut dyn RngCore,
) -> Result<GameRecord, AgentError> {
    black.new_game();
    white.new_game();
    let mut s = start.clone();
    let mut moves = Vec::new();
    while !s.is_terminal() {
        let color = s.to_move();
        let d = match color {
            Color::Black => black.select_move(&s, rng_black)?,
            Color::White => white.select_move(&s, rng_white)?,
        };
        if !s.is_legal(d.mv) {
            let who = if color == Color::Black { black.name() } else { white.name() };
            return Err(AgentError::Other(format!("{who} played illegal move {}", d.mv.to_gtp(s.size()))));
        }
        s = s.play(d.mv)?;
        moves.push(MoveInfo { color, mv: d.mv, value: d.value, policy: d.policy, forward_passes: d.forward_passes });
    }
    Ok(GameRecord {
        rules: *s.rules(),
        setup: s.setup().grid.clone(),
        first_to_move: s.setup().to_move,
        black: black.name(),
        white: white.name(),
        moves,
        score: score_tromp_taylor(&s),
        final_hash: s.hash(),
        adversary: None,
        victim_id: None,
    })
}

#[derive(Clone, Debug)]
pub struct MatchConfig {
    pub games: usize,
    pub rules: Rules,
    /// Start position (empty board when `None`).
    pub start: Option<GameState>,
    pub seed_a: u64,
    pub seed_b: u64,
    /// Agent A takes Black in even-numbered games (else in odd ones).
    pub a_black_first: bool,
    pub level: f64,
    pub sgf_dir: Option<PathBuf>,
}

impl MatchConfig {
    pub fn new(games: usize, rules: Rules, seed: u64) -> MatchConfig {
        MatchConfig {
            games,
            rules,
            start: None,
            seed_a: derive_seed(seed, 1),
            seed_b: derive_seed(seed, 2),
            a_black_first: true,
            level: 0.95,
            sgf_dir: None,
        }
    }

    /// Configuration for the same games with the agent order reversed.
    pub fn swapped(&self) -> MatchConfig {
        MatchConfig { seed_a: self.seed_b, seed_b: self.seed_a, a_black_first: !self.a_black_first, ..self.clone() }
    }

    pub fn a_is_black(&self, game: usize) -> bool {
        game.is_multiple_of(2) == self.a_black_first
    }
}

/// Aggregate results from agent A's point of view.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchStats {
    pub games: u64,
    /// A's points: wins plus half of draws.
    pub wins: f64,
    pub win_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    /// Mean Tromp-Taylor lead of A.
    pub mean_margin: f64,
    pub mean_length: f64,
    pub forward_passes_per_move_a: f64,
    pub forward_passes_per_move_b: f64,
}

/// Compute stats for A from records, where `a_black[i]` says whether A had
/// Black in record `i`.
pub fn match_stats(records: &[GameRecord], a_black: &[bool], level: f64) -> Result<MatchStats, StatsError> {
    let n = records.len() as u64;
    if n == 0 {
        return Err(StatsError::Counts { wins: 0.0, games: 0 });
    }
    let mut wins = 0.0;
    let mut margin = 0.0;
    let mut length = 0.0;
    let (mut fa, mut ma, mut fb, mut mb) = (0u64, 0u64, 0u64, 0u64);
    for (r, &ab) in records.iter().zip(a_black) {
        let a = if ab { Color::Black } else { Color::White };
        wins += r.points_for(a);
        margin += r.score.lead(a);
        length += r.length() as f64;
        for m in &r.moves {
            if m.color == a {
                fa += m.forward_passes;
                ma += 1;
            } else {
                fb += m.forward_passes;
                mb += 1;
            }
        }
    }
    let (ci_low, ci_high) = clopper_pearson_fractional(wins, n, level)?;
    Ok(MatchStats {
        games: n,
        wins,
        win_rate: wins / n as f64,
        ci_low,
        ci_high,
        level,
        mean_margin: margin / n as f64,
        mean_length: length / n as f64,
        forward_passes_per_move_a: fa as f64 / ma.max(1) as f64,
        forward_passes_per_move_b: fb as f64 / mb.max(1) as f64,
    })
}

#[derive(Clone, Debug)]
pub struct MatchOutcome {
    /// Completed games in game order.
    pub records: Vec<GameRecord>,
    /// Whether agent A played Black, per record.
    pub a_black: Vec<bool>,
    /// Games aborted by an agent failure: (game index, message). They are
    /// not counted in the statistics.
    pub errors: Vec<(usize, String)>,
    pub stats: Option<MatchStats>,
}

/// Play `config.games` games between A and B with alternating colours.
pub fn play_match(a: &dyn AgentFactory, b: &dyn AgentFactory, config: &MatchConfig) -> Result<MatchOutcome, AgentError> {
    let start = match &config.start {
        Some(s) => s.clone(),
        None => GameState::new(config.rules)?,
    };
    let results: Vec<(usize, bool, Result<GameRecord, String>)> = (0..config.games)
        .into_par_iter()
        .map(|g| {
            let a_black = config.a_is_black(g);
            let run = || -> Result<GameRecord, AgentError> {
                let mut agent_a = a.build()?;
                let mut agent_b = b.build()?;
                let mut rng_a = game_rng(config.seed_a, g as u64);
                let mut rng_b = game_rng(config.seed_b, g as u64);
                if a_black {
                    play_game(&mut *agent_a, &mut *agent_b, &start, &mut rng_a, &mut rng_b)
                } else {
                    play_game(&mut *agent_b, &mut *agent_a, &start, &mut rng_b, &mut rng_a)
                }
            };
            (g, a_black, run().map_err(|e| e.to_string()))
        })
        .collect();
    let mut out = MatchOutcome { records: Vec::new(), a_black: Vec::new(), errors: Vec::new(), stats: None };
    for (g, a_black, r) in results {
        match r {
            Ok(rec) => {
                if let Some(dir) = &config.sgf_dir {
                    std::fs::create_dir_all(dir).map_err(|e| AgentError::Other(e.to_string()))?;
                    let sgf = rec.to_sgf()?;
                    std::fs::write(dir.join(format!("game{g:05}.sgf")), sgf)
                        .map_err(|e| AgentError::Other(e.to_string()))?;
                }
                out.records.push(rec);
                out.a_black.push(a_black);
            }
            Err(e) => out.errors.push((g, e)),
        }
    }
    if !out.records.is_empty() {
        out.stats = Some(
            match_stats(&out.records, &out.a_black, config.level).map_err(|e| AgentError::Other(e.to_string()))?,
        );
    }
    Ok(out)
}
