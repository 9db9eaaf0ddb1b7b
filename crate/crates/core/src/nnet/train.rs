use super::features::FeaturePlanes;
use super::network::{HeadGrads, Network};
use super::NetError;

/// One training row, harvested at a position where the learner moved.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingExample {
    pub features: FeaturePlanes,
    /// Legal-move mask of the position (`points + 1`, pass last).
    pub legal: Vec<bool>,
    /// Search distribution over moves (`points + 1`), summing to 1.
    pub policy_target: Vec<f64>,
    /// Final result from the mover's perspective: +1 win, -1 loss, 0 draw.
    pub value_target: f64,
    /// Final area ownership per point from the mover's perspective.
    pub ownership_target: Vec<f64>,
    /// Move index the opponent actually replied with, if the game went on.
    pub opponent_move: Option<usize>,
}

/// Weights of the four loss terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossWeights {
    pub policy: f64,
    pub value: f64,
    pub ownership: f64,
    pub opponent: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights { policy: 1.0, value: 1.0, ownership: 0.15, opponent: 0.15 }
    }
}

/// Batch-mean loss terms (unweighted) and the weighted total.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossStats {
    pub total: f64,
    pub policy: f64,
    pub value: f64,
    pub ownership: f64,
    pub opponent: f64,
}

/// Loss = w_p·CE(policy) + w_v·(v − z)² + w_o·mean (o − y)² + w_m·CE(opponent),
/// averaged over the batch, together with its gradient.
pub fn loss_and_gradients(
    net: &Network,
    batch: &[&TrainingExample],
    weights: &LossWeights,
) -> Result<(LossStats, Vec<f64>), NetError> {
    if batch.is_empty() {
        return Err(NetError::EmptyBatch);
    }
    let inputs: Vec<_> = batch.iter().map(|e| (&e.features, e.legal.as_slice())).collect();
    let cache = net.forward_cached(&inputs)?;
    let p = net.arch().points();
    let m = batch.len() as f64;
    let mut d = HeadGrads {
        policy: vec![0.0; batch.len() * (p + 1)],
        opponent: vec![0.0; batch.len() * (p + 1)],
        value: vec![0.0; batch.len()],
        ownership: vec![0.0; batch.len() * p],
    };
    let mut stats = LossStats::default();
    for (b, (ex, out)) in batch.iter().zip(&cache.outputs).enumerate() {
        if ex.policy_target.len() != p + 1 || ex.ownership_target.len() != p {
            return Err(NetError::Shape(format!("example {b} has mis-sized targets")));
        }
        let mut ce = 0.0;
        for a in 0..=p {
            let t = ex.policy_target[a];
            if t > 0.0 {
                ce -= t * out.policy[a].ln();
            }
            d.policy[b * (p + 1) + a] = weights.policy * (out.policy[a] - t) / m;
        }
        let verr = out.value - ex.value_target;
        d.value[b] = weights.value * 2.0 * verr * (1.0 - out.value * out.value) / m;
        let mut own = 0.0;
        for i in 0..p {
            let e = out.ownership[i] - ex.ownership_target[i];
            own += e * e;
            d.ownership[b * p + i] =
                weights.ownership * 2.0 * e / p as f64 * (1.0 - out.ownership[i] * out.ownership[i]) / m;
        }
        own /= p as f64;
        let mut opp = 0.0;
        if let Some(mv) = ex.opponent_move {
            opp = -out.opponent[mv].ln();
            for a in 0..=p {
                let t = if a == mv { 1.0 } else { 0.0 };
                d.opponent[b * (p + 1) + a] = weights.opponent * (out.opponent[a] - t) / m;
            }
        }
        let total = weights.policy * ce + weights.value * verr * verr + weights.ownership * own + weights.opponent * opp;
        if !total.is_finite() {
            return Err(NetError::NonFiniteLoss { example: b });
        }
        stats.policy += ce / m;
        stats.value += verr * verr / m;
        stats.ownership += own / m;
        stats.opponent += opp / m;
        stats.total += total / m;
    }
    let grads = net.backward(&cache, &d);
    Ok((stats, grads))
}

/// SGD with momentum and a single 10× learning-rate decay.
#[derive(Clone, Debug)]
pub struct Sgd {
    pub lr: f64,
    pub momentum: f64,
    /// Step at which the learning rate drops by 10×; `None` disables it.
    pub decay_at: Option<u64>,
    pub steps: u64,
    velocity: Vec<f64>,
}

impl Sgd {
    pub fn new(lr: f64, momentum: f64, decay_at: Option<u64>) -> Sgd {
        Sgd { lr, momentum, decay_at, steps: 0, velocity: Vec::new() }
    }

    pub fn current_lr(&self) -> f64 {
        match self.decay_at {
            Some(at) if self.steps >= at => self.lr / 10.0,
            _ => self.lr,
        }
    }

    /// v ← μ·v + g; θ ← θ − lr·v, then round θ to f32 precision.
    pub fn step(&mut self, net: &mut Network, grads: &[f64]) {
        assert_eq!(grads.len(), net.params.len(), "gradient length");
        if self.velocity.len() != grads.len() {
            self.velocity = vec![0.0; grads.len()];
        }
        let lr = self.current_lr();
        for ((p, v), &g) in net.params.iter_mut().zip(&mut self.velocity).zip(grads) {
            *v = self.momentum * *v + g;
            *p -= lr * *v;
        }
        net.round_to_f32();
        self.steps += 1;
    }
}

/// Plain gradient step without momentum: θ ← θ − lr·g.
pub fn sgd_step(net: &mut Network, grads: &[f64], lr: f64) {
    Sgd::new(lr, 0.0, None).step(net, grads);
}
