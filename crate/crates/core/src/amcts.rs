//! Adversarial MCTS: the adversary searches with a gray-box model of the
//! victim. At victim nodes the walk follows the victim (sampled policy,
//! symmetry-averaged policy, or the victim's own search); at self nodes it
//! uses the UCB rule on statistics that ignore non-terminal victim nodes.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::go::{GameState, Vertex};
use crate::mcts::{
    choose_by, evaluate_position, policy_choice, run_search, sample_index, ucb_slot, Evaluator,
    MoveChoice, NodeId, NodeKind, SearchConfig, SearchError, SearchNode, SearchTree,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AMctsMode {
    /// Sample from the victim's raw policy.
    Sample,
    /// Sample from the victim's policy averaged over the 8 symmetries.
    SamplePlusPlus,
    /// Play the victim's own search result.
    Recursive,
}

impl fmt::Display for AMctsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AMctsMode::Sample => "S",
            AMctsMode::SamplePlusPlus => "S++",
            AMctsMode::Recursive => "R",
        })
    }
}

impl FromStr for AMctsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s" | "sample" => Ok(AMctsMode::Sample),
            "s++" | "spp" | "sample++" => Ok(AMctsMode::SamplePlusPlus),
            "r" | "recursive" => Ok(AMctsMode::Recursive),
            other => Err(format!("unknown A-MCTS mode {other:?} (expected S, S++ or R)")),
        }
    }
}

/// Query-only access to the victim: the adversary sees evaluation outputs,
/// never parameters.
#[derive(Clone)]
pub struct VictimHandle {
    pub evaluator: Arc<dyn Evaluator>,
    /// Inner search settings for recursive mode; `playouts` is replaced by
    /// the configured victim visit count and τ by 0.
    pub search: SearchConfig,
}

impl VictimHandle {
    pub fn new(evaluator: Arc<dyn Evaluator>) -> VictimHandle {
        VictimHandle { evaluator, search: SearchConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AMctsConfig {
    pub mode: AMctsMode,
    pub search: SearchConfig,
    /// Victim playouts per victim node in recursive mode.
    pub victim_visits: usize,
}

impl AMctsConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        self.search.validate()?;
        if self.mode == AMctsMode::Recursive && self.victim_visits == 0 {
            return Err(SearchError::Config("recursive mode needs victim_visits >= 1".into()));
        }
        Ok(())
    }

    /// Forward passes per move charged by the standard accounting: one per
    /// adversary playout, plus a full victim search per playout in
    /// recursive mode.
    pub fn nominal_forward_passes(&self) -> u64 {
        let n = self.search.playouts as u64;
        match self.mode {
            AMctsMode::Recursive => n * self.victim_visits as u64 + n,
            _ => n,
        }
    }
}

/// Weight of a node in the adversary's statistics.
pub fn node_weight(kind: NodeKind) -> u64 {
    match kind {
        NodeKind::SelfNode | NodeKind::Terminal => 1,
        NodeKind::VictimNode => 0,
    }
}

/// V̄^A of a present, non-terminal node; a node whose subtree carries no
/// weight (a fresh victim leaf) falls back to its own V̂.
pub fn weighted_mean(node: &SearchNode) -> f64 {
    if node.weighted_size == 0 {
        node.own_value
    } else {
        node.weighted_value_sum / node.weighted_size as f64
    }
}

/// Child slot the adversary walks to from self node `x`.
pub fn adversary_select(tree: &SearchTree, x: NodeId, alpha: f64, beta: f64) -> usize {
    ucb_slot(tree, x, alpha, beta, tree.nodes[x].weighted_size, |c| {
        (c.weighted_size, weighted_mean(c))
    })
}

/// Counters gathered during one A-MCTS search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AMctsStats {
    /// Adversary forward passes actually made.
    pub adversary_evaluations: u64,
    /// Victim forward passes actually made (memoized per node).
    pub victim_evaluations: u64,
    /// Victim nodes where the victim put no mass on legal moves.
    pub uniform_fallbacks: u64,
}

#[derive(Clone, Debug)]
pub struct AMctsOutcome {
    pub choice: MoveChoice,
    pub tree: SearchTree,
    pub stats: AMctsStats,
}

/// Victim move distribution per victim node, aligned with the node's
/// legal-move list.
struct VictimModel<'a> {
    victim: &'a VictimHandle,
    mode: AMctsMode,
    victim_visits: usize,
    memo: HashMap<NodeId, Vec<f64>>,
    stats: AMctsStats,
}

impl VictimModel<'_> {
    fn distribution<R: Rng + ?Sized>(
        &mut self,
        tree: &SearchTree,
        x: NodeId,
        rng: &mut R,
    ) -> Result<&[f64], SearchError> {
        if !self.memo.contains_key(&x) {
            let exp = tree.nodes[x].expansion.as_ref().expect("victim node is expanded");
            let state = &exp.state;
            let n = state.size();
            let wrap = |e| SearchError::eval(&tree.path_to(x), n, e);
            let mut dist: Vec<f64> = match self.mode {
                AMctsMode::Sample | AMctsMode::SamplePlusPlus => {
                    let legal = state.legal_mask()?;
                    let avg = self.mode == AMctsMode::SamplePlusPlus;
                    let (r, passes) =
                        evaluate_position(&*self.victim.evaluator, state, &legal, avg).map_err(wrap)?;
                    self.stats.victim_evaluations += passes;
                    exp.moves.iter().map(|v| r.policy[v.index(n)]).collect()
                }
                AMctsMode::Recursive => {
                    let cfg = SearchConfig { playouts: self.victim_visits, tau: 0.0, ..self.victim.search };
                    let t = run_search(state, &*self.victim.evaluator, &cfg, rng)?;
                    self.stats.victim_evaluations += t.evaluations;
                    let mv = match crate::mcts::choose_move(&t, 0.0, rng) {
                        Ok(c) => c.mv,
                        Err(SearchError::NoChildren) => policy_choice(&t, 0.0, rng).mv,
                        Err(e) => return Err(e),
                    };
                    exp.moves.iter().map(|&v| if v == mv { 1.0 } else { 0.0 }).collect()
                }
            };
            let total: f64 = dist.iter().filter(|p| p.is_finite() && **p > 0.0).sum();
            if total > 0.0 {
                dist.iter_mut().for_each(|p| {
                    *p = if p.is_finite() && *p > 0.0 { *p / total } else { 0.0 }
                });
            } else {
                self.stats.uniform_fallbacks += 1;
                let u = 1.0 / dist.len() as f64;
                dist.iter_mut().for_each(|p| *p = u);
            }
            self.memo.insert(x, dist);
        }
        Ok(&self.memo[&x])
    }
}

/// Child slot the walk takes at victim node `x`: a draw from the victim model.
fn victim_walk<R: Rng + ?Sized>(
    model: &mut VictimModel<'_>,
    tree: &SearchTree,
    x: NodeId,
    rng: &mut R,
) -> Result<usize, SearchError> {
    let dist = model.distribution(tree, x, rng)?.to_vec();
    Ok(sample_index(&dist, rng))
}

/// Grow an A-MCTS tree from `state` (adversary to move) and pick a move
/// ∝ S^A(c)^(1/τ).
pub fn run_amcts<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    state: &GameState,
    adversary: &E,
    victim: &VictimHandle,
    config: &AMctsConfig,
    rng: &mut R,
) -> Result<AMctsOutcome, SearchError> {
    config.validate()?;
    let search = &config.search;
    let mut tree = SearchTree::with_root(state, adversary, search.symmetry_average)?;
    if search.root_noise {
        tree.add_root_noise(rng);
    }
    let mut model = VictimModel {
        victim,
        mode: config.mode,
        victim_visits: config.victim_visits,
        memo: HashMap::new(),
        stats: AMctsStats::default(),
    };
    for _ in 0..search.playouts {
        let mut path = vec![SearchTree::ROOT];
        let mut x = SearchTree::ROOT;
        loop {
            let slot = match tree.nodes[x].kind {
                NodeKind::SelfNode => adversary_select(&tree, x, search.alpha, search.beta),
                NodeKind::VictimNode => victim_walk(&mut model, &tree, x, rng)?,
                NodeKind::Terminal => unreachable!("walks stop at terminal nodes"),
            };
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
                    let c = tree.insert_child(x, slot, adversary, search.symmetry_average, node_weight)?;
                    path.push(c);
                    break;
                }
            }
        }
        tree.backup(&path);
    }
    let mut stats = model.stats;
    stats.adversary_evaluations = tree.evaluations;
    let choice = match choose_by(&tree, search.tau, rng, |c| c.weighted_size as f64) {
        Ok(c) => c,
        Err(SearchError::NoChildren) => policy_choice(&tree, search.tau, rng),
        Err(e) => return Err(e),
    };
    Ok(AMctsOutcome { choice, tree, stats })
}

/// Normalized weighted sizes S^A of the root's children over move indices
/// (pass last); falls back to plain sizes S when every S^A is zero, and to
/// the root priors when the root has no children.
pub fn weighted_root_distribution(tree: &SearchTree) -> Vec<f64> {
    let root = tree.root();
    let exp = root.expansion.as_ref().expect("root expanded");
    let n = exp.state.size();
    let mut dist = vec![0.0; n * n + 1];
    let kids = tree.root_children();
    let weighted: u64 = kids.iter().map(|&(_, c)| tree.node(c).weighted_size).sum();
    let plain: u64 = kids.iter().map(|&(_, c)| tree.node(c).size).sum();
    if weighted > 0 || plain > 0 {
        for (m, c) in kids {
            let node = tree.node(c);
            dist[m.index(n)] = if weighted > 0 {
                node.weighted_size as f64 / weighted as f64
            } else {
                node.size as f64 / plain as f64
            };
        }
    } else {
        for (m, p) in exp.moves.iter().zip(&exp.priors) {
            dist[m.index(n)] = *p;
        }
    }
    dist
}

/// Pick a move for `state` with A-MCTS (convenience wrapper).
pub fn amcts_move<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    state: &GameState,
    adversary: &E,
    victim: &VictimHandle,
    config: &AMctsConfig,
    rng: &mut R,
) -> Result<Vertex, SearchError> {
    Ok(run_amcts(state, adversary, victim, config, rng)?.choice.mv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::go::{Color, Grid, Rules};
    use crate::mcts::{select_child, EvalResult, FnEvaluator, UniformEvaluator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(mode: AMctsMode, n: usize) -> AMctsConfig {
        AMctsConfig {
            mode,
            search: SearchConfig { playouts: n, alpha: 1.0, beta: 0.2, tau: 0.0, ..Default::default() },
            victim_visits: 8,
        }
    }

    fn always_pass() -> Arc<dyn Evaluator> {
        Arc::new(FnEvaluator(|_: &GameState, legal: &[bool]| {
            let mut policy = vec![0.0; legal.len()];
            *policy.last_mut().unwrap() = 1.0;
            Ok(EvalResult { value: 0.0, policy, ownership: None, opponent_move: None })
        }))
    }

    fn recompute_weighted(tree: &SearchTree, id: NodeId) -> u64 {
        let n = &tree.nodes[id];
        if n.is_terminal() {
            return n.size * n.weight;
        }
        n.weight + n.children().map(|c| recompute_weighted(tree, c)).sum::<u64>()
    }

    #[test]
    fn weights_follow_node_kind() {
        assert_eq!(node_weight(NodeKind::SelfNode), 1);
        assert_eq!(node_weight(NodeKind::Terminal), 1);
        assert_eq!(node_weight(NodeKind::VictimNode), 0);
    }

    #[test]
    fn victim_child_with_one_self_grandchild_has_weight_one() {
        // The always-pass victim answers every adversary move with a pass.
        let s = GameState::new(Rules::new(5)).unwrap();
        let out = run_amcts(&s, &UniformEvaluator::default(), &VictimHandle::new(always_pass()), &cfg(AMctsMode::Sample, 2), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let t = &out.tree;
        let (_, child) = t.root_children()[0];
        assert_eq!(t.node(child).kind, NodeKind::VictimNode);
        let grand: Vec<_> = t.node(child).children().collect();
        assert_eq!(grand.len(), 1);
        assert_eq!(t.node(grand[0]).kind, NodeKind::SelfNode);
        assert_eq!(t.node(child).weighted_size, 1);
        assert_eq!(t.node(child).size, 2);
    }

    #[test]
    fn fresh_victim_leaf_uses_own_value() {
        let s = GameState::new(Rules::new(5)).unwrap();
        let out = run_amcts(&s, &UniformEvaluator { value: 0.3 }, &VictimHandle::new(always_pass()), &cfg(AMctsMode::Sample, 1), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let (_, child) = out.tree.root_children()[0];
        let c = out.tree.node(child);
        assert_eq!(c.weighted_size, 0);
        assert_eq!(weighted_mean(c), c.own_value);
        assert_eq!(c.own_value, -0.3);
    }

    #[test]
    fn always_pass_victim_lets_adversary_find_passing_win() {
        // White (adversary) is ahead by komi on an empty 3x3 board and the
        // victim always passes: after Black's pass, White's pass wins.
        let s = GameState::new(Rules::new(3)).unwrap().play(Vertex::Pass).unwrap();
        assert_eq!(s.to_move(), Color::White);
        let out = run_amcts(&s, &UniformEvaluator::default(), &VictimHandle::new(always_pass()), &cfg(AMctsMode::Sample, 40), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let pass = out.tree.root_children().into_iter().find(|(m, _)| m.is_pass()).unwrap().1;
        let node = out.tree.node(pass);
        assert_eq!(node.kind, NodeKind::Terminal);
        assert_eq!(node.weight, 1);
        assert_eq!(node.own_value, 1.0);
        assert_eq!(out.choice.mv, Vertex::Pass);
    }

    #[test]
    fn point_mass_victim_has_single_child_per_victim_node() {
        let s = GameState::new(Rules::new(5)).unwrap();
        let out = run_amcts(&s, &UniformEvaluator::default(), &VictimHandle::new(always_pass()), &cfg(AMctsMode::Sample, 60), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        for n in &out.tree.nodes {
            if n.kind == NodeKind::VictimNode {
                assert!(n.children().count() <= 1);
            }
        }
    }

    #[test]
    fn weighted_sizes_match_recompute() {
        let victim: Arc<dyn Evaluator> = Arc::new(UniformEvaluator::default());
        let s = GameState::new(Rules::new(4)).unwrap();
        for mode in [AMctsMode::Sample, AMctsMode::SamplePlusPlus, AMctsMode::Recursive] {
            let out = run_amcts(&s, &UniformEvaluator { value: 0.1 }, &VictimHandle::new(victim.clone()), &cfg(mode, 80), &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
            for id in 0..out.tree.nodes.len() {
                let n = out.tree.node(id);
                assert_eq!(recompute_weighted(&out.tree, id), n.weighted_size);
                assert!(n.weighted_size <= n.size);
            }
            assert_eq!(out.tree.node_count(), 81);
        }
    }

    #[test]
    fn all_self_tree_matches_plain_selection() {
        let e = FnEvaluator(|s: &GameState, legal: &[bool]| {
            let h = s.hash();
            let policy = legal.iter().enumerate().map(|(i, &l)| if l { 1.0 + ((h >> (i % 40)) & 15) as f64 } else { 0.0 }).collect();
            Ok(EvalResult { value: ((h % 1000) as f64 / 500.0) - 1.0, policy, ownership: None, opponent_move: None })
        });
        let s = GameState::new(Rules::new(4)).unwrap();
        let mut t = run_search(&s, &e, &SearchConfig { playouts: 200, ..Default::default() }, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        // With every weight 1 the weighted statistics equal the plain ones.
        for n in t.nodes.iter_mut() {
            n.weight = 1;
        }
        for id in 0..t.nodes.len() {
            if t.nodes[id].kind == NodeKind::SelfNode {
                for (alpha, beta) in [(0.0, 0.0), (1.0, 0.0), (1.1, 0.2), (3.0, 1.0)] {
                    assert_eq!(adversary_select(&t, id, alpha, beta), select_child(&t, id, alpha, beta));
                }
            }
        }
    }

    #[test]
    fn recursive_mode_plays_victim_search_move() {
        let grid = Grid::from_diagram("XO.\nXO.\n.O.").unwrap();
        let s = GameState::from_setup(Rules::new(3), grid, Color::Black).unwrap();
        let victim: Arc<dyn Evaluator> = Arc::new(UniformEvaluator::default());
        let handle = VictimHandle::new(victim.clone());
        let out = run_amcts(&s, &UniformEvaluator::default(), &handle, &cfg(AMctsMode::Recursive, 30), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        for (id, n) in out.tree.nodes.iter().enumerate() {
            if n.kind != NodeKind::VictimNode {
                continue;
            }
            let kids: Vec<_> = n.children().collect();
            if kids.is_empty() {
                continue;
            }
            assert_eq!(kids.len(), 1);
            let state = &n.expansion.as_ref().unwrap().state;
            let c = SearchConfig { playouts: 8, tau: 0.0, ..handle.search };
            let t = run_search(state, &victim, &c, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
            let expect = crate::mcts::choose_move(&t, 0.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap().mv;
            assert_eq!(out.tree.node(kids[0]).move_in, expect, "node {id}");
        }
    }

    #[test]
    fn nominal_accounting() {
        let mut c = cfg(AMctsMode::Sample, 64);
        assert_eq!(c.nominal_forward_passes(), 64);
        c.mode = AMctsMode::Recursive;
        c.victim_visits = 63;
        assert_eq!(c.nominal_forward_passes(), 64 * 63 + 64);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [AMctsMode::Sample, AMctsMode::SamplePlusPlus, AMctsMode::Recursive] {
            assert_eq!(m.to_string().parse::<AMctsMode>().unwrap(), m);
        }
    }
}
