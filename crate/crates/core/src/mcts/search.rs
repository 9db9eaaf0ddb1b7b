use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{
    evaluate_symmetry_averaged, normalize_over_legal, EvalResult, Evaluator, Expansion, NodeId,
    NodeKind, SearchConfig, SearchError, SearchNode, SearchTree,
};
use crate::go::{score_tromp_taylor, GameState, Vertex};

/// Total Dirichlet concentration spread over the legal root moves.
const ROOT_NOISE_CONCENTRATION: f64 = 10.83;
const ROOT_NOISE_FRACTION: f64 = 0.25;

/// Evaluate `state`, optionally averaging over the board symmetries.
/// Returns the result and the number of forward passes used.
pub fn evaluate_position<E: Evaluator + ?Sized>(
    evaluator: &E,
    state: &GameState,
    legal: &[bool],
    symmetry_average: bool,
) -> Result<(EvalResult, u64), super::EvalError> {
    if symmetry_average {
        Ok((evaluate_symmetry_averaged(evaluator, state, legal)?, 8))
    } else {
        let mut r = evaluator.evaluate(state, legal)?;
        if r.policy.len() != legal.len() {
            return Err(super::EvalError::Shape(format!(
                "policy has {} entries, expected {}",
                r.policy.len(),
                legal.len()
            )));
        }
        normalize_over_legal(&mut r.policy, legal);
        Ok((r, 1))
    }
}

fn expansion(state: GameState, policy: &[f64]) -> Result<Expansion, SearchError> {
    let n = state.size();
    let moves = state.legal_moves()?;
    let mut priors: Vec<f64> = moves.iter().map(|v| policy[v.index(n)]).collect();
    let total: f64 = priors.iter().sum();
    if total > 0.0 {
        priors.iter_mut().for_each(|p| *p /= total);
    } else {
        let u = 1.0 / priors.len() as f64;
        priors.iter_mut().for_each(|p| *p = u);
    }
    let children = vec![None; moves.len()];
    Ok(Expansion { state, moves, priors, children })
}

impl SearchTree {
    /// Tree holding only an evaluated root.
    pub(crate) fn with_root<E: Evaluator + ?Sized>(
        state: &GameState,
        evaluator: &E,
        symmetry_average: bool,
    ) -> Result<SearchTree, SearchError> {
        if state.is_terminal() {
            return Err(SearchError::TerminalRoot);
        }
        let legal = state.legal_mask()?;
        let (r, passes) = evaluate_position(evaluator, state, &legal, symmetry_average)
            .map_err(|e| SearchError::eval(&[], state.size(), e))?;
        let root = SearchNode {
            move_in: state.last_move().map(|m| m.1).unwrap_or(Vertex::Pass),
            parent: None,
            to_move: state.to_move(),
            kind: NodeKind::SelfNode,
            prior: 1.0,
            size: 1,
            value_sum: r.value,
            weighted_size: 1,
            weighted_value_sum: r.value,
            own_value: r.value,
            weight: 1,
            expansion: Some(expansion(state.clone(), &r.policy)?),
        };
        Ok(SearchTree { nodes: vec![root], root_player: state.to_move(), evaluations: passes })
    }

    /// Mix Dirichlet noise into the root prior.
    pub(crate) fn add_root_noise<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let exp = self.nodes[0].expansion.as_mut().expect("root is expanded");
        let k = exp.priors.len();
        let gamma = Gamma::new(ROOT_NOISE_CONCENTRATION / k as f64, 1.0).expect("positive shape");
        let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            for (p, d) in exp.priors.iter_mut().zip(draws) {
                *p = (1.0 - ROOT_NOISE_FRACTION) * *p + ROOT_NOISE_FRACTION * d / total;
            }
        }
    }

    /// Materialize child `slot` of `parent` (statistics are left to
    /// [`SearchTree::backup`]). `weight_of` assigns the node weight.
    pub(crate) fn insert_child<E: Evaluator + ?Sized>(
        &mut self,
        parent: NodeId,
        slot: usize,
        evaluator: &E,
        symmetry_average: bool,
        weight_of: fn(NodeKind) -> u64,
    ) -> Result<NodeId, SearchError> {
        let exp = self.nodes[parent].expansion.as_ref().expect("parent is expanded");
        let mv = exp.moves[slot];
        let prior = exp.priors[slot];
        let state = exp.state.play(mv)?;
        let root_player = self.root_player;
        let (kind, own_value, expansion) = if state.is_terminal() {
            let v = score_tromp_taylor(&state).winner.value_for(root_player);
            (NodeKind::Terminal, v, None)
        } else {
            let legal = state.legal_mask()?;
            let (r, passes) = evaluate_position(evaluator, &state, &legal, symmetry_average)
                .map_err(|e| {
                    let mut path = self.path_to(parent);
                    path.push(mv);
                    SearchError::eval(&path, state.size(), e)
                })?;
            self.evaluations += passes;
            let kind = if state.to_move() == root_player {
                NodeKind::SelfNode
            } else {
                NodeKind::VictimNode
            };
            let v = if kind == NodeKind::SelfNode { r.value } else { -r.value };
            (kind, v, Some(expansion(state.clone(), &r.policy)?))
        };
        let node = SearchNode {
            move_in: mv,
            parent: Some(parent),
            to_move: state.to_move(),
            kind,
            prior,
            size: 0,
            value_sum: 0.0,
            weighted_size: 0,
            weighted_value_sum: 0.0,
            own_value,
            weight: weight_of(kind),
            expansion,
        };
        let id = self.push(node);
        self.nodes[parent].expansion.as_mut().expect("parent is expanded").children[slot] = Some(id);
        Ok(id)
    }

    /// Value used for an absent child under `parent` (first-play urgency):
    /// V̄(parent) moved by β·√(explored prior mass) against the player to move.
    pub fn fpu_value(&self, parent: NodeId, beta: f64) -> f64 {
        let node = &self.nodes[parent];
        let exp = node.expansion.as_ref().expect("parent is expanded");
        let correction = beta * exp.explored_prior_mass().sqrt();
        if node.to_move == self.root_player {
            node.mean_value() - correction
        } else {
            node.mean_value() + correction
        }
    }
}

fn unit_weight(_: NodeKind) -> u64 {
    1
}

/// Slot index chosen by the UCB rule with per-child statistics `stats`
/// (subtree size, mean value) for present non-terminal children and
/// `parent_size` as the parent's size. Root-player nodes maximize, others
/// minimize. Ties go to the larger prior, then the earlier slot.
pub(crate) fn ucb_slot(
    tree: &SearchTree,
    x: NodeId,
    alpha: f64,
    beta: f64,
    parent_size: u64,
    stats: impl Fn(&SearchNode) -> (u64, f64),
) -> usize {
    let node = &tree.nodes[x];
    let exp = node.expansion.as_ref().expect("selection at an expanded node");
    let sign = if node.to_move == tree.root_player { 1.0 } else { -1.0 };
    let fpu = tree.fpu_value(x, beta);
    let explore = alpha * (parent_size.saturating_sub(1) as f64).sqrt();
    let mut best = 0;
    let mut best_u = f64::NEG_INFINITY;
    let mut best_p = f64::NEG_INFINITY;
    for (slot, (&child, &p)) in exp.children.iter().zip(&exp.priors).enumerate() {
        let (s, v) = match child {
            None => (0, fpu),
            Some(c) => {
                let c = &tree.nodes[c];
                if c.is_terminal() {
                    (c.size, c.own_value)
                } else {
                    stats(c)
                }
            }
        };
        let u = sign * v + explore * p / (1.0 + s as f64);
        if u > best_u || (u == best_u && p > best_p) {
            best = slot;
            best_u = u;
            best_p = p;
        }
    }
    best
}

/// Child slot the plain MCTS walk takes from `x`.
pub fn select_child(tree: &SearchTree, x: NodeId, alpha: f64, beta: f64) -> usize {
    ucb_slot(tree, x, alpha, beta, tree.nodes[x].size, |c| (c.size, c.mean_value()))
}

/// Grow a search tree from `state` with `config.playouts` playouts.
pub fn run_search<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    state: &GameState,
    evaluator: &E,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<SearchTree, SearchError> {
    config.validate()?;
    let mut tree = SearchTree::with_root(state, evaluator, config.symmetry_average)?;
    if config.root_noise {
        tree.add_root_noise(rng);
    }
    for _ in 0..config.playouts {
        let mut path = vec![SearchTree::ROOT];
        let mut x = SearchTree::ROOT;
        loop {
            let slot = select_child(&tree, x, config.alpha, config.beta);
            let existing = tree.nodes[x].expansion.as_ref().expect("expanded").children[slot];
            match existing {
                Some(c) => {
                    path.push(c);
                    if tree.nodes[c].is_terminal() {
                        break;
                    }
                    x = c;
                }
                None => {
                    let c = tree.insert_child(
                        x,
                        slot,
                        evaluator,
                        config.symmetry_average,
                        unit_weight,
                    )?;
                    path.push(c);
                    break;
                }
            }
        }
        tree.backup(&path);
    }
    Ok(tree)
}

/// Final-move distribution over `counts` ∝ count^(1/τ). τ = 0 puts all mass
/// on the largest count, ties broken by larger prior then earlier entry.
pub fn temperature_distribution(counts: &[f64], priors: &[f64], tau: f64) -> Vec<f64> {
    let mut out = vec![0.0; counts.len()];
    if counts.is_empty() {
        return out;
    }
    if tau == 0.0 {
        let mut best = 0;
        for i in 1..counts.len() {
            if counts[i] > counts[best] || (counts[i] == counts[best] && priors[i] > priors[best]) {
                best = i;
            }
        }
        out[best] = 1.0;
        return out;
    }
    let max = counts.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        let u = 1.0 / counts.len() as f64;
        out.iter_mut().for_each(|p| *p = u);
        return out;
    }
    for (o, &c) in out.iter_mut().zip(counts) {
        *o = if c > 0.0 { ((c.ln() - max.ln()) / tau).exp() } else { 0.0 };
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    out
}

/// Draw an index from a distribution that sums to 1.
pub fn sample_index<R: Rng + ?Sized>(dist: &[f64], rng: &mut R) -> usize {
    let mut r: f64 = rng.random::<f64>();
    let mut last = 0;
    for (i, &p) in dist.iter().enumerate() {
        if p > 0.0 {
            if r < p {
                return i;
            }
            r -= p;
            last = i;
        }
    }
    last
}

/// Move chosen from the root together with the distribution it was drawn
/// from (over root children, in legal-move order).
#[derive(Clone, Debug, PartialEq)]
pub struct MoveChoice {
    pub mv: Vertex,
    pub distribution: Vec<(Vertex, f64)>,
}

/// Pick the final move from root-child counts given by `count_of`.
pub(crate) fn choose_by<R: Rng + ?Sized>(
    tree: &SearchTree,
    tau: f64,
    rng: &mut R,
    count_of: impl Fn(&SearchNode) -> f64,
) -> Result<MoveChoice, SearchError> {
    let kids = tree.root_children();
    if kids.is_empty() {
        return Err(SearchError::NoChildren);
    }
    let counts: Vec<f64> = kids.iter().map(|&(_, c)| count_of(&tree.nodes[c])).collect();
    let priors: Vec<f64> = kids.iter().map(|&(_, c)| tree.nodes[c].prior).collect();
    let dist = temperature_distribution(&counts, &priors, tau);
    let pick = if tau == 0.0 {
        dist.iter().position(|&p| p == 1.0).unwrap_or(0)
    } else {
        sample_index(&dist, rng)
    };
    Ok(MoveChoice {
        mv: kids[pick].0,
        distribution: kids.iter().map(|&(m, _)| m).zip(dist).collect(),
    })
}

/// Final move ∝ S(c)^(1/τ) over root children.
pub fn choose_move<R: Rng + ?Sized>(
    tree: &SearchTree,
    tau: f64,
    rng: &mut R,
) -> Result<MoveChoice, SearchError> {
    choose_by(tree, tau, rng, |c| c.size as f64)
}

/// Convenience: search and pick a move, falling back to the raw policy
/// argmax (or a policy sample when τ > 0) when N = 0.
pub fn search_move<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    state: &GameState,
    evaluator: &E,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<(MoveChoice, SearchTree), SearchError> {
    let tree = run_search(state, evaluator, config, rng)?;
    let choice = match choose_move(&tree, config.tau, rng) {
        Ok(c) => c,
        Err(SearchError::NoChildren) => policy_choice(&tree, config.tau, rng),
        Err(e) => return Err(e),
    };
    Ok((choice, tree))
}

/// Move drawn from the root prior alone.
pub(crate) fn policy_choice<R: Rng + ?Sized>(tree: &SearchTree, tau: f64, rng: &mut R) -> MoveChoice {
    let exp = tree.nodes[0].expansion.as_ref().expect("root is expanded");
    let pick = if tau == 0.0 {
        let mut best = 0;
        for i in 1..exp.priors.len() {
            if exp.priors[i] > exp.priors[best] {
                best = i;
            }
        }
        best
    } else {
        sample_index(&exp.priors, rng)
    };
    MoveChoice {
        mv: exp.moves[pick],
        distribution: exp.moves.iter().cloned().zip(exp.priors.iter().cloned()).collect(),
    }
}
