//! Finite-difference gradient checker for the network loss.

use advgo::go::{GameState, Rules};
use advgo::nnet::{encode, loss_and_gradients, Arch, LossWeights, Network, TrainingExample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-4;
/// Denominator floor so that gradients that are zero up to rounding do not
/// produce meaningless ratios.
const FLOOR: f64 = 1e-6;

fn examples(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<TrainingExample> {
    (0..count)
        .map(|_| {
            let mut s = GameState::new(Rules::new(n)).unwrap();
            for _ in 0..rng.random_range(0..n * n / 2) {
                let m = s.legal_moves().unwrap();
                let v = m[rng.random_range(0..m.len() - 1)];
                s = s.play(v).unwrap();
            }
            let legal = s.legal_mask().unwrap();
            let mut policy_target: Vec<f64> =
                legal.iter().map(|&l| if l { rng.random::<f64>() } else { 0.0 }).collect();
            let t: f64 = policy_target.iter().sum();
            policy_target.iter_mut().for_each(|x| *x /= t);
            TrainingExample {
                features: encode(&s),
                legal,
                policy_target,
                value_target: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                ownership_target: (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect(),
                opponent_move: Some(rng.random_range(0..=n * n)),
            }
        })
        .collect()
}

/// Worst relative error over every parameter, and how many parameters had a
/// gradient above the floor.
pub fn check(weights: LossWeights) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let arch = Arch::new(2, 3, 4);
    let net = Network::random(arch, 0.5, &mut rng).unwrap();
    let ex = examples(&mut rng, 4, 3);
    let refs: Vec<_> = ex.iter().collect();
    let loss = |params: Vec<f64>| {
        let net = Network::from_params(arch, params).unwrap();
        loss_and_gradients(&net, &refs, &weights).unwrap().0.total
    };
    let (_, g) = loss_and_gradients(&net, &refs, &weights).unwrap();
    let mut worst = 0.0f64;
    let mut live = 0;
    for i in 0..net.param_count() {
        let mut plus = net.params().to_vec();
        plus[i] += EPS;
        let mut minus = net.params().to_vec();
        minus[i] -= EPS;
        let numeric = (loss(plus) - loss(minus)) / (2.0 * EPS);
        let scale = g[i].abs().max(numeric.abs());
        if scale > FLOOR {
            live += 1;
        }
        worst = worst.max((g[i] - numeric).abs() / scale.max(FLOOR));
    }
    (worst, live)
}

pub fn only(head: &str) -> LossWeights {
    let mut w = LossWeights { policy: 0.0, value: 0.0, ownership: 0.0, opponent: 0.0 };
    match head {
        "policy" => w.policy = 1.0,
        "value" => w.value = 1.0,
        "ownership" => w.ownership = 1.0,
        _ => w.opponent = 1.0,
    }
    w
}
