use std::sync::Arc;

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::amcts::{run_amcts, weighted_root_distribution, AMctsConfig, VictimHandle};
use crate::benson::{pass_forbidden, pass_hardened_filter};
use crate::go::{GameState, GoError, Vertex};
use crate::mcts::{
    evaluate_position, run_search, sample_index, temperature_distribution, EvalError, EvalResult,
    Evaluator, SearchConfig, SearchError,
};
use crate::nnet::NetError;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Go(#[from] GoError),
    #[error("{0}")]
    Other(String),
}

/// A move plus whatever the agent knows about it.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveDecision {
    pub mv: Vertex,
    /// Value estimate in [-1, 1] from the mover's perspective.
    pub value: Option<f64>,
    /// Search (or policy) distribution over move indices, pass last.
    pub policy: Option<Vec<f64>>,
    /// Forward passes charged for this move by the standard accounting.
    pub forward_passes: u64,
}

impl MoveDecision {
    pub fn plain(mv: Vertex) -> MoveDecision {
        MoveDecision { mv, value: None, policy: None, forward_passes: 0 }
    }
}

/// Anything that can play a game of Go, one move at a time.
pub trait Agent: Send {
    fn name(&self) -> String;

    /// Called before the first move of every game.
    fn new_game(&mut self) {}

    fn select_move(&mut self, state: &GameState, rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError>;
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn new_game(&mut self) {
        (**self).new_game()
    }

    fn select_move(&mut self, state: &GameState, rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        (**self).select_move(state, rng)
    }
}

/// Uniformly random legal placement; passes only when there is none.
#[derive(Clone, Debug, Default)]
pub struct RandomAgent;

impl Agent for RandomAgent {
    fn name(&self) -> String {
        "random".into()
    }

    fn select_move(&mut self, state: &GameState, rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        let moves: Vec<Vertex> = state.legal_moves()?.into_iter().filter(|v| !v.is_pass()).collect();
        let mv = if moves.is_empty() { Vertex::Pass } else { moves[rng.random_range(0..moves.len())] };
        Ok(MoveDecision::plain(mv))
    }
}

/// Always passes.
#[derive(Clone, Debug, Default)]
pub struct PassAgent;

impl Agent for PassAgent {
    fn name(&self) -> String {
        "pass".into()
    }

    fn select_move(&mut self, _state: &GameState, _rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        Ok(MoveDecision::plain(Vertex::Pass))
    }
}

/// Win probability (1 + v) / 2 above which a confident victim passes.
pub const CONFIDENT_PASS_WIN_PROBABILITY: f64 = 0.995;

/// Evaluator wrapper that moves all policy mass onto Pass whenever the inner
/// evaluator's win probability (1 + v) / 2 exceeds `threshold`: a victim
/// that passes as soon as it believes it has won.
#[derive(Clone)]
pub struct ConfidentPass<E> {
    pub inner: E,
    pub threshold: f64,
}

impl<E> ConfidentPass<E> {
    pub fn new(inner: E) -> ConfidentPass<E> {
        ConfidentPass { inner, threshold: CONFIDENT_PASS_WIN_PROBABILITY }
    }
}

pub fn is_confident(value: f64, threshold: f64) -> bool {
    (1.0 + value) / 2.0 > threshold
}

impl<E: Evaluator> Evaluator for ConfidentPass<E> {
    fn evaluate(&self, state: &GameState, legal: &[bool]) -> Result<EvalResult, EvalError> {
        let mut r = self.inner.evaluate(state, legal)?;
        if is_confident(r.value, self.threshold) {
            r.policy.iter_mut().for_each(|p| *p = 0.0);
            *r.policy.last_mut().expect("nonempty policy") = 1.0;
        }
        Ok(r)
    }
}

fn pick(dist: &[f64], tau: f64, rng: &mut dyn RngCore) -> usize {
    if tau == 0.0 {
        let mut best = 0;
        for i in 1..dist.len() {
            if dist[i] > dist[best] {
                best = i;
            }
        }
        best
    } else if tau == 1.0 {
        sample_index(dist, rng)
    } else {
        let sharpened = temperature_distribution(dist, &vec![0.0; dist.len()], tau);
        sample_index(&sharpened, rng)
    }
}

/// Network-driven player: raw policy (`search = None`) or MCTS.
///
/// With `confident_pass` set, the move distribution collapses onto Pass
/// when the root value's win probability exceeds the threshold. With
/// `hardened` set, Pass is removed whenever a legal placement exists
/// outside the mover's pass-alive territory; if that leaves no mass (the
/// agent only wanted to pass) the network's own distribution without Pass
/// is used instead.
pub struct NetAgent {
    pub label: String,
    pub evaluator: Arc<dyn Evaluator>,
    pub search: Option<SearchConfig>,
    /// Temperature for the final choice (0 = argmax).
    pub tau: f64,
    pub confident_pass: Option<f64>,
    pub hardened: bool,
}

impl NetAgent {
    pub fn policy(label: impl Into<String>, evaluator: Arc<dyn Evaluator>) -> NetAgent {
        NetAgent { label: label.into(), evaluator, search: None, tau: 0.0, confident_pass: None, hardened: false }
    }
}

impl Agent for NetAgent {
    fn name(&self) -> String {
        let mut s = self.label.clone();
        if let Some(cfg) = &self.search {
            s.push_str(&format!("+mcts{}", cfg.playouts));
        }
        if self.hardened {
            s.push_str("+hardened");
        }
        s
    }

    fn select_move(&mut self, state: &GameState, rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        let n = state.size();
        let legal = state.legal_mask()?;
        let (raw, value, passes) = match &self.search {
            None => {
                let (r, passes) = evaluate_position(&*self.evaluator, state, &legal, false)?;
                (r.policy, r.value, passes)
            }
            Some(cfg) => {
                let tree = run_search(state, &*self.evaluator, cfg, rng)?;
                let mut dist = vec![0.0; n * n + 1];
                let kids = tree.root_children();
                if kids.is_empty() {
                    let exp = tree.root().expansion.as_ref().expect("root expanded");
                    for (m, p) in exp.moves.iter().zip(&exp.priors) {
                        dist[m.index(n)] = *p;
                    }
                } else {
                    let total: f64 = kids.iter().map(|&(_, c)| tree.node(c).size as f64).sum();
                    for (m, c) in kids {
                        dist[m.index(n)] = tree.node(c).size as f64 / total;
                    }
                }
                (dist, tree.root().mean_value(), cfg.playouts.max(1) as u64)
            }
        };
        let mut dist = raw.clone();
        if let Some(threshold) = self.confident_pass {
            if is_confident(value, threshold) {
                dist.iter_mut().for_each(|p| *p = 0.0);
                dist[n * n] = 1.0;
            }
        }
        if self.hardened && pass_forbidden(state) {
            let only_pass = dist[..n * n].iter().all(|&p| p <= 0.0);
            dist = pass_hardened_filter(state, if only_pass { &raw } else { &dist });
        }
        let idx = pick(&dist, self.tau, rng);
        Ok(MoveDecision { mv: Vertex::from_index(idx, n), value: Some(value), policy: Some(dist), forward_passes: passes })
    }
}

/// Adversary playing with A-MCTS against a modelled victim.
pub struct AdversaryAgent {
    pub label: String,
    pub evaluator: Arc<dyn Evaluator>,
    pub victim: VictimHandle,
    pub config: AMctsConfig,
}

impl Agent for AdversaryAgent {
    fn name(&self) -> String {
        format!("{}+amcts-{}{}", self.label, self.config.mode, self.config.search.playouts)
    }

    fn select_move(&mut self, state: &GameState, rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        let out = run_amcts(state, &*self.evaluator, &self.victim, &self.config, rng)?;
        let policy = weighted_root_distribution(&out.tree);
        Ok(MoveDecision {
            mv: out.choice.mv,
            value: Some(out.tree.root().mean_value()),
            policy: Some(policy),
            forward_passes: self.config.nominal_forward_passes().max(1),
        })
    }
}

/// Pass-hardening for any agent: a Pass is replaced by a legal placement
/// outside the mover's pass-alive territory whenever one exists, drawn from
/// the agent's reported distribution without Pass (uniform if it reported
/// none).
pub struct Hardened<A> {
    pub inner: A,
}

impl<A: Agent> Agent for Hardened<A> {
    fn name(&self) -> String {
        format!("{}+hardened", self.inner.name())
    }

    fn new_game(&mut self) {
        self.inner.new_game()
    }

    fn select_move(&mut self, state: &GameState, rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        let mut d = self.inner.select_move(state, rng)?;
        if d.mv.is_pass() && pass_forbidden(state) {
            let n = state.size();
            let base = d.policy.clone().unwrap_or_else(|| vec![0.0; n * n + 1]);
            let dist = pass_hardened_filter(state, &base);
            d.mv = Vertex::from_index(sample_index(&dist, rng), n);
            d.policy = Some(dist);
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::go::{Color, Grid, Rules};
    use crate::mcts::{FnEvaluator, UniformEvaluator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn confident(value: f64) -> Arc<dyn Evaluator> {
        Arc::new(FnEvaluator(move |_: &GameState, legal: &[bool]| Ok(EvalResult::uniform(legal, value))))
    }

    #[test]
    fn confident_pass_threshold_is_on_win_probability() {
        assert!(!is_confident(0.99, CONFIDENT_PASS_WIN_PROBABILITY));
        assert!(is_confident(0.9901, CONFIDENT_PASS_WIN_PROBABILITY));
        let s = GameState::new(Rules::new(5)).unwrap();
        let legal = s.legal_mask().unwrap();
        let e = ConfidentPass::new(UniformEvaluator { value: 0.995 });
        let r = e.evaluate(&s, &legal).unwrap();
        assert_eq!(r.policy[25], 1.0);
        let e = ConfidentPass::new(UniformEvaluator { value: 0.98 });
        assert!(e.evaluate(&s, &legal).unwrap().policy[25] < 1.0);
    }

    #[test]
    fn hardened_net_agent_does_not_pass_with_moves_left() {
        let s = GameState::new(Rules::new(5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut soft = NetAgent { confident_pass: Some(0.995), ..NetAgent::policy("v", confident(0.999)) };
        assert_eq!(soft.select_move(&s, &mut rng).unwrap().mv, Vertex::Pass);
        let mut hard = NetAgent { hardened: true, ..NetAgent { confident_pass: Some(0.995), ..NetAgent::policy("v", confident(0.999)) } };
        let d = hard.select_move(&s, &mut rng).unwrap();
        assert!(!d.mv.is_pass());
        // The fallback keeps the network's own distribution over placements.
        assert!((d.policy.unwrap()[0] - 1.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn hardened_agent_may_pass_inside_own_territory() {
        // Black owns the whole board with two eyes: every legal placement is
        // inside Black's pass-alive territory, so passing is allowed.
        let g = Grid::from_diagram("X.X\nXXX\nX.X").unwrap();
        let s = GameState::from_setup(Rules::new(3), g, Color::Black).unwrap();
        let mut hard = Hardened { inner: PassAgent };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(hard.select_move(&s, &mut rng).unwrap().mv, Vertex::Pass);
        let s = GameState::new(Rules::new(3)).unwrap();
        assert!(!hard.select_move(&s, &mut rng).unwrap().mv.is_pass());
    }

    #[test]
    fn random_agent_only_passes_without_placements() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = GameState::new(Rules::new(3)).unwrap();
        for _ in 0..50 {
            assert!(!RandomAgent.select_move(&s, &mut rng).unwrap().mv.is_pass());
        }
    }
}
