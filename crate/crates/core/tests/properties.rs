//! Property tests for the invariants every module promises.

mod support;

use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use advgo::amcts::{node_weight, run_amcts, AMctsConfig, AMctsMode, VictimHandle};
use advgo::arena::{
    clopper_pearson, clopper_pearson_fractional, play_game, play_match, Agent, AgentError, Hardened, MatchConfig,
    RandomAgent,
};
use advgo::baselines::{BaselineAgent, BaselineKind};
use advgo::benson::pass_forbidden;
use advgo::go::{from_sgf, score_grid, to_sgf, Color, GameState, Rules, Vertex};
use advgo::mcts::{Evaluator, SearchConfig, SearchTree, UniformEvaluator};
use advgo::nnet::{encode, Arch, Network, TrainingExample};
use advgo::victim_play::ReplayBuffer;

fn random_game(size: usize, moves: usize, pass_prob: f64, rng: &mut ChaCha8Rng) -> GameState {
    let mut s = GameState::new(Rules::new(size)).unwrap();
    for _ in 0..moves {
        if s.is_terminal() {
            break;
        }
        let legal = s.legal_moves().unwrap();
        let placements: Vec<Vertex> = legal.iter().copied().filter(|v| !v.is_pass()).collect();
        let v = if placements.is_empty() || rng.random::<f64>() < pass_prob {
            Vertex::Pass
        } else {
            placements[rng.random_range(0..placements.len())]
        };
        s = s.play(v).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn no_position_ever_repeats(seed in any::<u64>(), size in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_game(size, 200, 0.05, &mut rng);
        // Passes repeat the position by design; placements never do.
        let mut seen = HashSet::new();
        let mut prev = None;
        for k in 0..=s.move_count() {
            let g = s.grid_after(k);
            if k > 0 && s.moves()[k - 1].1.is_pass() {
                prop_assert_eq!(Some(&g), prev.as_ref());
            } else {
                prop_assert!(seen.insert(g.clone()), "position after move {} repeats", k);
            }
            prev = Some(g);
        }
    }

    #[test]
    fn score_matches_flood_fill_oracle(seed in any::<u64>(), size in 3usize..8, half_komi in -20i32..20) {
        let komi = half_komi as f64 / 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = support::random_playout_grid(size, &mut rng);
        let s = score_grid(&g, komi);
        let (b, w) = support::oracle_score(&g, komi);
        prop_assert_eq!((s.black_points, s.white_points), (b, w));
    }

    #[test]
    fn sgf_round_trip_is_exact(seed in any::<u64>(), size in 3usize..10, moves in 0usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_game(size, moves, 0.1, &mut rng);
        let text = to_sgf(&s);
        let back = from_sgf(&text).unwrap();
        prop_assert_eq!(back.hash(), s.hash());
        prop_assert_eq!(to_sgf(&back), text);
    }

    #[test]
    fn recorded_games_replay_to_their_hash(seed in any::<u64>()) {
        let start = GameState::new(Rules::new(5)).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(seed);
        let mut r2 = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let rec = play_game(&mut RandomAgent, &mut BaselineAgent::new(BaselineKind::Spiral), &start, &mut r1, &mut r2)
            .unwrap();
        let end = rec.replay().unwrap();
        prop_assert_eq!(end.hash(), rec.final_hash);
        prop_assert!(end.is_terminal());
        prop_assert_eq!(advgo::go::score_tromp_taylor(&end), rec.score);
    }

    #[test]
    fn replay_rows_are_never_used_beyond_the_reuse_limit(
        seed in any::<u64>(),
        reuse in 1u32..5,
        rows in 1usize..40,
        batch in 1usize..8,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = GameState::new(Rules::new(3)).unwrap();
        let row = TrainingExample {
            features: encode(&state),
            legal: vec![true; 10],
            policy_target: vec![0.1; 10],
            value_target: 0.0,
            ownership_target: vec![0.0; 9],
            opponent_move: None,
        };
        let mut buf = ReplayBuffer::new(rows, reuse, batch);
        buf.extend(std::iter::repeat_n(row, rows));
        let mut drawn = 0u64;
        while let Some(b) = buf.sample(batch, &mut rng) {
            prop_assert_eq!(b.len(), batch);
            drawn += batch as u64;
            prop_assert!(buf.use_counts().all(|c| c <= reuse));
        }
        prop_assert_eq!(buf.consumed(), drawn);
        prop_assert!(drawn <= rows as u64 * reuse as u64);
        prop_assert!(buf.available() < batch);
    }

    #[test]
    fn weighted_sizes_never_exceed_sizes(seed in any::<u64>(), opening in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arch = Arch::new(1, 4, 5);
        let adversary = Network::random(arch, 0.5, &mut rng).unwrap();
        let victim: Arc<dyn Evaluator> = Arc::new(Network::random(arch, 0.5, &mut rng).unwrap());
        let state = random_game(5, opening, 0.2, &mut rng);
        prop_assume!(!state.is_terminal());
        let config = AMctsConfig { mode: AMctsMode::Sample, search: SearchConfig::default().with_playouts(40), victim_visits: 4 };
        let out = run_amcts(&state, &adversary, &VictimHandle::new(victim), &config, &mut rng).unwrap();
        for (id, node) in out.tree.nodes.iter().enumerate() {
            prop_assert!(node.weighted_size <= node.size, "node {}", id);
            // Recompute S^A from the node weights of the subtree.
            let mut total = 0u64;
            let mut stack = vec![id];
            while let Some(x) = stack.pop() {
                let n = &out.tree.nodes[x];
                if n.is_terminal() {
                    total += n.size * node_weight(n.kind);
                } else {
                    total += node_weight(n.kind);
                    stack.extend(n.children());
                }
            }
            prop_assert_eq!(total, node.weighted_size);
        }
        prop_assert_eq!(out.tree.node_count(), 41);
    }

    #[test]
    fn baselines_only_play_legal_moves(seed in any::<u64>(), kind in 0usize..3, size in 3usize..9) {
        let kind = [BaselineKind::Edge, BaselineKind::Spiral, BaselineKind::Mirror][kind];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut agent = BaselineAgent::new(kind);
        agent.new_game();
        let mut s = GameState::new(Rules::new(size)).unwrap();
        while !s.is_terminal() {
            let v = if s.to_move() == Color::Black {
                agent.select_move(&s, &mut rng).unwrap().mv
            } else {
                let legal = s.legal_moves().unwrap();
                legal[rng.random_range(0..legal.len())]
            };
            prop_assert!(s.is_legal(v), "{:?} chose illegal {}", kind, v);
            s = s.play(v).unwrap();
        }
    }

    #[test]
    fn hardened_agents_never_pass_while_forbidden(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut agent = Hardened { inner: advgo::arena::PassAgent };
        let mut s = GameState::new(Rules::new(4)).unwrap();
        while !s.is_terminal() {
            let v = if s.to_move() == Color::Black {
                let v = agent.select_move(&s, &mut rng).unwrap().mv;
                if v.is_pass() {
                    prop_assert!(!pass_forbidden(&s));
                }
                v
            } else {
                let legal = s.legal_moves().unwrap();
                legal[rng.random_range(0..legal.len())]
            };
            s = s.play(v).unwrap();
        }
    }

    #[test]
    fn clopper_pearson_brackets_the_estimate(games in 1u64..300, frac in 0.0f64..=1.0, level in 0.5f64..0.999) {
        let wins = (frac * games as f64).round() as u64;
        let (lo, hi) = clopper_pearson(wins, games, level).unwrap();
        let p = wins as f64 / games as f64;
        prop_assert!((0.0..=p).contains(&lo) && (p..=1.0).contains(&hi));
        if wins == 0 { prop_assert_eq!(lo, 0.0); }
        if wins == games { prop_assert_eq!(hi, 1.0); }
        // Integer scores give the ordinary interval.
        prop_assert_eq!(clopper_pearson_fractional(wins as f64, games, level).unwrap(), (lo, hi));
        // Wider at higher confidence.
        let (lo2, hi2) = clopper_pearson(wins, games, (level + 1.0) / 2.0).unwrap();
        prop_assert!(lo2 <= lo && hi2 >= hi);
    }
}

#[test]
fn swapping_the_agents_mirrors_the_match() {
    let rules = Rules::new(5);
    let config = MatchConfig::new(12, rules, 9);
    let random = || -> Result<Box<dyn Agent>, AgentError> { Ok(Box::new(RandomAgent)) };
    let edge = || -> Result<Box<dyn Agent>, AgentError> { Ok(Box::new(BaselineAgent::new(BaselineKind::Edge))) };
    let ab = play_match(&random, &edge, &config).unwrap();
    let ba = play_match(&edge, &random, &config.swapped()).unwrap();
    for (x, y) in ab.records.iter().zip(&ba.records) {
        assert_eq!(x.moves, y.moves);
        assert_eq!(x.score, y.score);
    }
    let (s, t) = (ab.stats.unwrap(), ba.stats.unwrap());
    assert!((s.win_rate + t.win_rate - 1.0).abs() < 1e-12);
    assert!((s.mean_margin + t.mean_margin).abs() < 1e-9);
    assert!((s.ci_low - (1.0 - t.ci_high)).abs() < 1e-9);
}

#[test]
fn uniform_search_tree_accounting() {
    let state = GameState::new(Rules::new(4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for playouts in [0, 1, 7, 50] {
        let cfg = SearchConfig::default().with_playouts(playouts);
        let tree: SearchTree = advgo::mcts::run_search(&state, &UniformEvaluator { value: 0.0 }, &cfg, &mut rng).unwrap();
        assert_eq!(tree.node_count(), playouts as u64 + 1);
    }
}
