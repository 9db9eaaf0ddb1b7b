use std::collections::VecDeque;

use rand::Rng;

use crate::nnet::{loss_and_gradients, LossStats, LossWeights, NetError, Network, Sgd, TrainingExample};

use super::TrainError;

/// FIFO replay buffer that lets each row be trained on at most
/// `reuse` times.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    pub capacity: usize,
    pub reuse: u32,
    pub min_rows: usize,
    rows: VecDeque<(TrainingExample, u32)>,
    total_consumed: u64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, reuse: u32, min_rows: usize) -> ReplayBuffer {
        ReplayBuffer { capacity, reuse, min_rows, rows: VecDeque::new(), total_consumed: 0 }
    }

    pub fn push(&mut self, row: TrainingExample) {
        if self.capacity == 0 {
            return;
        }
        if self.rows.len() == self.capacity {
            self.rows.pop_front();
        }
        self.rows.push_back((row, 0));
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = TrainingExample>) {
        for r in rows {
            self.push(r);
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows that may still be trained on.
    pub fn available(&self) -> usize {
        self.rows.iter().filter(|(_, u)| *u < self.reuse).count()
    }

    pub fn use_counts(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows.iter().map(|(_, u)| *u)
    }

    /// Total row-consumptions so far.
    pub fn consumed(&self) -> u64 {
        self.total_consumed
    }

    /// Draw `batch` distinct rows uniformly among those under the reuse
    /// limit and charge one use to each. `None` when the buffer is below
    /// its minimum size or fewer than `batch` rows remain usable.
    pub fn sample<R: Rng + ?Sized>(&mut self, batch: usize, rng: &mut R) -> Option<Vec<TrainingExample>> {
        if self.rows.len() < self.min_rows || batch == 0 {
            return None;
        }
        let mut open: Vec<usize> = (0..self.rows.len()).filter(|&i| self.rows[i].1 < self.reuse).collect();
        if open.len() < batch {
            return None;
        }
        // Partial Fisher-Yates: the first `batch` entries become the sample.
        for k in 0..batch {
            let j = rng.random_range(k..open.len());
            open.swap(k, j);
        }
        open.truncate(batch);
        open.sort_unstable();
        self.total_consumed += batch as u64;
        Some(
            open.into_iter()
                .map(|i| {
                    self.rows[i].1 += 1;
                    self.rows[i].0.clone()
                })
                .collect(),
        )
    }
}

/// Outcome of one training epoch.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EpochStats {
    pub steps: u64,
    /// Mean of the per-step loss terms.
    pub loss: LossStats,
}

/// Run up to `max_steps` SGD steps on batches drawn from `buffer`. Stops
/// early when the buffer runs out of usable rows; if not even one batch is
/// available the buffer is reported as starved (the caller should generate
/// fresh data), which is distinct from a training failure.
pub fn train_epoch<R: Rng + ?Sized>(
    buffer: &mut ReplayBuffer,
    net: &mut Network,
    opt: &mut Sgd,
    batch_size: usize,
    max_steps: u64,
    weights: &LossWeights,
    rng: &mut R,
) -> Result<EpochStats, TrainError> {
    let mut stats = EpochStats::default();
    while stats.steps < max_steps {
        let Some(batch) = buffer.sample(batch_size, rng) else {
            break;
        };
        let refs: Vec<&TrainingExample> = batch.iter().collect();
        let (loss, grads) = loss_and_gradients(net, &refs, weights).map_err(|e| match e {
            NetError::NonFiniteLoss { example } => TrainError::NonFinite { step: opt.steps, example },
            other => TrainError::Net(other),
        })?;
        opt.step(net, &grads);
        stats.steps += 1;
        stats.loss.total += loss.total;
        stats.loss.policy += loss.policy;
        stats.loss.value += loss.value;
        stats.loss.ownership += loss.ownership;
        stats.loss.opponent += loss.opponent;
    }
    if stats.steps == 0 && max_steps > 0 {
        return Err(TrainError::Starved { rows: buffer.len(), available: buffer.available(), batch: batch_size });
    }
    if stats.steps > 0 {
        let k = stats.steps as f64;
        stats.loss.total /= k;
        stats.loss.policy /= k;
        stats.loss.value /= k;
        stats.loss.ownership /= k;
        stats.loss.opponent /= k;
    }
    Ok(stats)
}
