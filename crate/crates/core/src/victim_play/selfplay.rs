use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::arena::{derive_seed, game_rng};
use crate::go::Rules;
use crate::mcts::SearchConfig;
use crate::nnet::{self, Arch, LossWeights, Network, Sgd};

use super::buffer::{train_epoch, EpochStats, ReplayBuffer};
use super::game::selfplay_game;
use super::TrainError;

/// Ordinary MCTS self-play used to grow the desk-scale victim ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfplayConfig {
    pub seed: u64,
    pub board_size: usize,
    pub komi: f64,
    pub blocks: usize,
    pub channels: usize,
    pub playouts: usize,
    /// Moves sampled at temperature 1 at the start of each game.
    pub explore_moves: usize,
    pub games_per_iteration: usize,
    pub steps_per_iteration: u64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub buffer_capacity: usize,
    pub min_rows: usize,
    pub reuse: u32,
    /// Iteration numbers after which a checkpoint is emitted.
    pub checkpoints: Vec<u64>,
}

impl Default for SelfplayConfig {
    fn default() -> Self {
        SelfplayConfig {
            seed: 0,
            board_size: 7,
            komi: 7.5,
            blocks: 2,
            channels: 16,
            playouts: 32,
            explore_moves: 8,
            games_per_iteration: 16,
            steps_per_iteration: 16,
            batch_size: 128,
            learning_rate: 0.02,
            momentum: 0.9,
            buffer_capacity: 20_000,
            min_rows: 512,
            reuse: 4,
            checkpoints: vec![5, 15, 40],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfplayRecord {
    pub iteration: u64,
    pub games: u64,
    pub black_win_rate: f64,
    pub mean_length: f64,
    pub train_steps: u64,
    pub loss_total: f64,
    pub loss_value: f64,
}

/// Run self-play and return the checkpoints in ladder order (weakest
/// first) with their labels, plus per-iteration metrics. Checkpoints are
/// also saved as `victim-<iteration>.bin` under `out_dir` when given.
pub fn selfplay_train(
    config: &SelfplayConfig,
    out_dir: Option<&Path>,
) -> Result<(Vec<(String, Network)>, Vec<SelfplayRecord>), TrainError> {
    let rules = Rules::new(config.board_size).with_komi(config.komi);
    rules.validate()?;
    if config.checkpoints.is_empty() {
        return Err(TrainError::Config("no checkpoints requested".into()));
    }
    let arch = Arch::new(config.blocks, config.channels, config.board_size);
    let mut init = game_rng(derive_seed(config.seed, 1), 0);
    let mut net = Network::new(arch, &mut init)?;
    let mut opt = Sgd::new(config.learning_rate, config.momentum, None);
    let mut buffer = ReplayBuffer::new(config.buffer_capacity, config.reuse, config.min_rows);
    let mut train_rng = game_rng(derive_seed(config.seed, 3), 0);
    let games_seed = derive_seed(config.seed, 2);
    let search = SearchConfig { playouts: config.playouts, root_noise: true, ..SearchConfig::default() };
    if let Some(d) = out_dir {
        std::fs::create_dir_all(d)?;
    }
    let last = *config.checkpoints.iter().max().expect("nonempty");
    let mut out = Vec::new();
    let mut metrics = Vec::new();
    let mut games = 0u64;
    for iteration in 1..=last {
        let results: Vec<_> = (games..games + config.games_per_iteration as u64)
            .into_par_iter()
            .map(|g| {
                let mut rng = game_rng(games_seed, g);
                selfplay_game(&net, &search, config.explore_moves, rules, &mut rng)
            })
            .collect();
        let (mut black_points, mut length) = (0.0, 0.0);
        let count = results.len() as f64;
        for r in results {
            let (record, rows) = r?;
            black_points += record.points_for(crate::go::Color::Black);
            length += record.length() as f64;
            buffer.extend(rows);
        }
        games += config.games_per_iteration as u64;
        let epoch = match train_epoch(
            &mut buffer,
            &mut net,
            &mut opt,
            config.batch_size,
            config.steps_per_iteration,
            &LossWeights::default(),
            &mut train_rng,
        ) {
            Ok(e) => e,
            Err(TrainError::Starved { .. }) => EpochStats::default(),
            Err(e) => return Err(e),
        };
        metrics.push(SelfplayRecord {
            iteration,
            games,
            black_win_rate: black_points / count,
            mean_length: length / count,
            train_steps: epoch.steps,
            loss_total: epoch.loss.total,
            loss_value: epoch.loss.value,
        });
        if config.checkpoints.contains(&iteration) {
            let label = format!("victim-{iteration:03}");
            if let Some(d) = out_dir {
                nnet::save(&net, d.join(format!("{label}.bin")))?;
            }
            out.push((label, net.clone()));
        }
    }
    Ok((out, metrics))
}
