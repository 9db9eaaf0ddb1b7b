use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::amcts::{run_amcts, weighted_root_distribution, AMctsConfig, VictimHandle};
use crate::arena::{Agent, AgentError, ConfidentPass, NetAgent, CONFIDENT_PASS_WIN_PROBABILITY};
use crate::go::{area_ownership, score_tromp_taylor, Color, GameState, Grid, Rules};
use crate::mcts::{run_search, Evaluator, SearchConfig};
use crate::nnet::{encode, Network, TrainingExample};

use super::record::{GameRecord, MoveInfo};

/// A frozen victim: a checkpoint plus how it chooses moves.
#[derive(Clone)]
pub struct Victim {
    pub id: String,
    pub net: Arc<Network>,
    /// Win-probability threshold above which the victim passes (`None`
    /// disables the behaviour).
    pub confident_pass: Option<f64>,
    /// Victim search; `None` plays straight from the policy.
    pub search: Option<SearchConfig>,
    /// Temperature of the victim's move choice (0 = argmax).
    pub tau: f64,
}

impl Victim {
    /// Policy-only victim with the confident-pass behaviour, playing argmax.
    pub fn new(id: impl Into<String>, net: Arc<Network>) -> Victim {
        Victim { id: id.into(), net, confident_pass: Some(CONFIDENT_PASS_WIN_PROBABILITY), search: None, tau: 0.0 }
    }

    /// The victim's evaluator, with the pass behaviour folded into the
    /// policy so that a search modelling the victim sees it too.
    pub fn evaluator(&self) -> Arc<dyn Evaluator> {
        match self.confident_pass {
            Some(threshold) => Arc::new(ConfidentPass { inner: self.net.clone(), threshold }),
            None => self.net.clone(),
        }
    }

    /// Handle for modelling the victim inside A-MCTS.
    pub fn handle(&self) -> VictimHandle {
        let mut h = VictimHandle::new(self.evaluator());
        if let Some(s) = self.search {
            h.search = s;
        }
        h
    }

    /// A playing agent for this victim, optionally pass-hardened.
    pub fn agent(&self, hardened: bool) -> NetAgent {
        NetAgent {
            label: self.id.clone(),
            evaluator: self.evaluator(),
            search: self.search,
            tau: self.tau,
            confident_pass: None,
            hardened,
        }
    }
}

/// Ownership target from `mover`'s perspective: +1 own area, -1 opponent's.
pub fn ownership_target(final_grid: &Grid, mover: Color) -> Vec<f64> {
    area_ownership(final_grid)
        .into_iter()
        .map(|o| match o {
            Some(c) if c == mover => 1.0,
            Some(_) => -1.0,
            None => 0.0,
        })
        .collect()
}

/// Fill in outcome-dependent targets once a game is over.
fn finish_examples(examples: &mut [(Color, TrainingExample)], record: &GameRecord, final_grid: &Grid) {
    for (mover, ex) in examples.iter_mut() {
        ex.value_target = record.score.winner.value_for(*mover);
        ex.ownership_target = ownership_target(final_grid, *mover);
    }
}

/// Play one adversary-vs-victim game. The adversary moves by A-MCTS with
/// the victim modelled by `victim.handle()`; training rows are harvested
/// only where the adversary moved. Games cut off by the turn limit are
/// scored like any other.
pub fn generate_game<R: Rng + ?Sized>(
    adversary: &Network,
    victim: &Victim,
    amcts: &AMctsConfig,
    adversary_color: Color,
    rules: Rules,
    rng: &mut R,
) -> Result<(GameRecord, Vec<TrainingExample>), AgentError> {
    let handle = victim.handle();
    let mut victim_agent = victim.agent(false);
    let mut s = GameState::new(rules)?;
    let n = rules.board_size;
    let mut moves = Vec::new();
    let mut harvested: Vec<(Color, TrainingExample)> = Vec::new();
    let mut rng_dyn = RngAdapter(rng);
    while !s.is_terminal() {
        let color = s.to_move();
        if color == adversary_color {
            let out = run_amcts(&s, adversary, &handle, amcts, &mut rng_dyn)?;
            let policy = weighted_root_distribution(&out.tree);
            harvested.push((
                color,
                TrainingExample {
                    features: encode(&s),
                    legal: s.legal_mask()?,
                    policy_target: policy.clone(),
                    value_target: 0.0,
                    ownership_target: Vec::new(),
                    opponent_move: None,
                },
            ));
            moves.push(MoveInfo {
                color,
                mv: out.choice.mv,
                value: Some(out.tree.root().mean_value()),
                policy: Some(policy),
                forward_passes: amcts.nominal_forward_passes(),
            });
            s = s.play(out.choice.mv)?;
        } else {
            let d = victim_agent.select_move(&s, &mut rng_dyn)?;
            if let Some((_, last)) = harvested.last_mut() {
                if last.opponent_move.is_none() && moves.last().map(|m: &MoveInfo| m.color) == Some(adversary_color) {
                    last.opponent_move = Some(d.mv.index(n));
                }
            }
            moves.push(MoveInfo { color, mv: d.mv, value: d.value, policy: d.policy, forward_passes: d.forward_passes });
            s = s.play(d.mv)?;
        }
    }
    let record = GameRecord {
        rules,
        setup: s.setup().grid.clone(),
        first_to_move: s.setup().to_move,
        black: if adversary_color == Color::Black { "adversary".into() } else { victim.id.clone() },
        white: if adversary_color == Color::White { "adversary".into() } else { victim.id.clone() },
        moves,
        score: score_tromp_taylor(&s),
        final_hash: s.hash(),
        adversary: Some(adversary_color),
        victim_id: Some(victim.id.clone()),
    };
    finish_examples(&mut harvested, &record, s.grid());
    Ok((record, harvested.into_iter().map(|(_, e)| e).collect()))
}

/// One game of ordinary MCTS self-play; rows are harvested for both sides
/// with the visit distribution as policy target. Moves are sampled at
/// temperature 1 for the first `explore_moves` moves and at `search.tau`
/// afterwards.
pub fn selfplay_game<R: Rng + ?Sized>(
    net: &Network,
    search: &SearchConfig,
    explore_moves: usize,
    rules: Rules,
    rng: &mut R,
) -> Result<(GameRecord, Vec<TrainingExample>), AgentError> {
    let n = rules.board_size;
    let mut s = GameState::new(rules)?;
    let mut moves: Vec<MoveInfo> = Vec::new();
    let mut harvested: Vec<(Color, TrainingExample)> = Vec::new();
    while !s.is_terminal() {
        let color = s.to_move();
        let tree = run_search(&s, net, search, rng)?;
        let tau = if s.move_count() < explore_moves { 1.0 } else { search.tau };
        let choice = match crate::mcts::choose_move(&tree, tau, rng) {
            Ok(c) => c,
            Err(crate::mcts::SearchError::NoChildren) => crate::mcts::policy_choice(&tree, tau, rng),
            Err(e) => return Err(e.into()),
        };
        let mut policy = vec![0.0; n * n + 1];
        let kids = tree.root_children();
        let total: f64 = kids.iter().map(|&(_, c)| tree.node(c).size as f64).sum();
        if total > 0.0 {
            for (m, c) in kids {
                policy[m.index(n)] = tree.node(c).size as f64 / total;
            }
        } else {
            for (m, p) in &choice.distribution {
                policy[m.index(n)] = *p;
            }
        }
        if let Some((_, prev)) = harvested.last_mut() {
            prev.opponent_move = Some(choice.mv.index(n));
        }
        harvested.push((
            color,
            TrainingExample {
                features: encode(&s),
                legal: s.legal_mask()?,
                policy_target: policy.clone(),
                value_target: 0.0,
                ownership_target: Vec::new(),
                opponent_move: None,
            },
        ));
        moves.push(MoveInfo {
            color,
            mv: choice.mv,
            value: Some(tree.root().mean_value()),
            policy: Some(policy),
            forward_passes: search.playouts as u64,
        });
        s = s.play(choice.mv)?;
    }
    let record = GameRecord {
        rules,
        setup: s.setup().grid.clone(),
        first_to_move: s.setup().to_move,
        black: "selfplay".into(),
        white: "selfplay".into(),
        moves,
        score: score_tromp_taylor(&s),
        final_hash: s.hash(),
        adversary: None,
        victim_id: None,
    };
    finish_examples(&mut harvested, &record, s.grid());
    Ok((record, harvested.into_iter().map(|(_, e)| e).collect()))
}

/// Lets a generic `Rng` be passed where `&mut dyn RngCore` is expected.
struct RngAdapter<'a, R: ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
}
