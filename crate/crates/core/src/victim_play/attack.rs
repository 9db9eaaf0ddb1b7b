use std::collections::VecDeque;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arena::{clopper_pearson_fractional, derive_seed, game_rng};
use crate::go::Color;
use crate::nnet::{self, LossWeights, Network, Sgd};

use super::buffer::{train_epoch, EpochStats, ReplayBuffer};
use super::config::AttackConfig;
use super::curriculum::{curriculum_step, CurriculumStage, WinWindow};
use super::game::{generate_game, Victim};
use super::record::GameRecord;
use super::TrainError;

const SEED_INIT: u64 = 1;
const SEED_GAMES: u64 = 2;
const SEED_TRAIN: u64 = 3;

/// One line of the metrics log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub event: &'static str,
    pub iteration: u64,
    pub stage: usize,
    pub victim: String,
    pub games_total: u64,
    pub stage_games: u64,
    pub window_games: usize,
    pub win_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Adversary moves generated so far (time-step accounting).
    pub adversary_moves: u64,
    pub buffer_rows: usize,
    pub train_steps: u64,
    pub loss_total: f64,
    pub loss_policy: f64,
    pub loss_value: f64,
    pub loss_ownership: f64,
    pub loss_opponent: f64,
}

/// Result of a successful attack run.
#[derive(Clone, Debug)]
pub struct AttackReport {
    pub adversary: Network,
    /// Path of the adversary checkpoint that cleared the final stage.
    pub final_checkpoint: PathBuf,
    pub metrics: Vec<MetricsRecord>,
    /// Games of the final stage's last window.
    pub window_records: Vec<GameRecord>,
    pub games_total: u64,
    pub adversary_moves: u64,
}

/// Load the victim ladder named in `config`; ids are the file stems.
pub fn load_victims(config: &AttackConfig) -> Result<Vec<Victim>, TrainError> {
    if config.victims.is_empty() {
        return Err(TrainError::Config("no victim checkpoints configured".into()));
    }
    config
        .victims
        .iter()
        .map(|p| {
            let net = nnet::load(p)?;
            if net.arch().board_size != config.board_size {
                return Err(TrainError::Config(format!(
                    "victim {} is for {}x{}, run is {}x{}",
                    p.display(),
                    net.arch().board_size,
                    net.arch().board_size,
                    config.board_size,
                    config.board_size
                )));
            }
            let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| p.display().to_string());
            let mut v = Victim::new(id, Arc::new(net));
            v.confident_pass = config.victim_confident_pass;
            v.tau = config.victim_tau;
            Ok(v)
        })
        .collect()
}

struct MetricsLog {
    file: Option<File>,
    records: Vec<MetricsRecord>,
}

impl MetricsLog {
    fn push(&mut self, r: MetricsRecord) -> Result<(), TrainError> {
        if let Some(f) = &mut self.file {
            let line = serde_json::to_string(&r).map_err(|e| TrainError::Config(e.to_string()))?;
            writeln!(f, "{line}")?;
            f.flush()?;
        }
        self.records.push(r);
        Ok(())
    }
}

/// Train an adversary from scratch against the victim ladder with A-MCTS
/// and a curriculum. Writes `metrics.jsonl` and checkpoints into `out_dir`
/// when given. Stops as soon as the final stage's window win rate exceeds
/// the threshold; running out of game budget first is an error carrying the
/// state of the stalled stage.
pub fn attack_train(config: &AttackConfig, victims: &[Victim], out_dir: Option<&Path>) -> Result<AttackReport, TrainError> {
    config.validate()?;
    if victims.is_empty() {
        return Err(TrainError::Config("no victims".into()));
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let stages: Vec<CurriculumStage> = victims.iter().map(|v| CurriculumStage::new(v.id.clone(), config.window)).collect();
    let rules = config.rules();
    let train_amcts = config.amcts(config.train_tau);
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, SEED_INIT));
    let mut adversary = Network::new(config.arch(), &mut init_rng)?;
    let mut opt = Sgd::new(config.learning_rate, config.momentum, config.lr_decay_at);
    let mut buffer = ReplayBuffer::new(config.buffer_capacity, config.reuse, config.min_rows);
    let mut train_rng = game_rng(derive_seed(config.seed, SEED_TRAIN), 0);
    let games_seed = derive_seed(config.seed, SEED_GAMES);
    let weights = LossWeights::default();
    let mut log = MetricsLog {
        file: match out_dir {
            Some(d) => Some(File::create(d.join("metrics.jsonl"))?),
            None => None,
        },
        records: Vec::new(),
    };

    let mut stage = 0usize;
    let mut window = WinWindow::new(config.window);
    let mut window_records: VecDeque<GameRecord> = VecDeque::new();
    let mut stage_games = 0u64;
    let mut games_total = 0u64;
    let mut adversary_moves = 0u64;
    let mut iteration = 0u64;

    loop {
        if games_total >= config.max_games {
            if let Some(d) = out_dir {
                nnet::save(&adversary, d.join("adversary-last.bin"))?;
            }
            return Err(TrainError::BudgetExhausted {
                stage,
                victim: stages[stage].victim_id.clone(),
                games: games_total,
                window_games: window.games(),
                win_rate: window.win_rate(),
            });
        }
        iteration += 1;
        let batch = (config.games_per_iteration as u64).min(config.max_games - games_total);
        let victim = &victims[stage];
        let results: Vec<_> = (games_total..games_total + batch)
            .into_par_iter()
            .map(|g| {
                let color = if g % 2 == 0 { Color::Black } else { Color::White };
                let mut rng = game_rng(games_seed, g);
                generate_game(&adversary, victim, &train_amcts, color, rules, &mut rng)
            })
            .collect();
        for (k, r) in results.into_iter().enumerate() {
            let (record, examples) = r?;
            let adv = record.adversary.expect("victim-play record");
            window.push(record.points_for(adv));
            adversary_moves += record.moves.iter().filter(|m| m.color == adv).count() as u64;
            buffer.extend(examples);
            if config.archive_sgf {
                if let Some(d) = out_dir {
                    let dir = d.join("games");
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join(format!("game{:06}.sgf", games_total + k as u64)), record.to_sgf()?)?;
                }
            }
            if window_records.len() == config.window {
                window_records.pop_front();
            }
            window_records.push_back(record);
        }
        games_total += batch;
        stage_games += batch;

        let snapshot = |event: &'static str,
                        epoch: &EpochStats,
                        stage: usize,
                        stage_games: u64,
                        window: &WinWindow,
                        buffer_rows: usize|
         -> Result<MetricsRecord, TrainError> {
            let (ci_low, ci_high) = if window.games() > 0 {
                clopper_pearson_fractional(window.points(), window.games() as u64, 0.95)
                    .map_err(|e| TrainError::Config(e.to_string()))?
            } else {
                (0.0, 1.0)
            };
            Ok(MetricsRecord {
                event,
                iteration,
                stage,
                victim: stages[stage].victim_id.clone(),
                games_total,
                stage_games,
                window_games: window.games(),
                win_rate: window.win_rate(),
                ci_low,
                ci_high,
                adversary_moves,
                buffer_rows,
                train_steps: epoch.steps,
                loss_total: epoch.loss.total,
                loss_policy: epoch.loss.policy,
                loss_value: epoch.loss.value,
                loss_ownership: epoch.loss.ownership,
                loss_opponent: epoch.loss.opponent,
            })
        };

        if window.is_full() && window.win_rate() > stages[stage].threshold {
            let next = curriculum_step(window.win_rate(), stage, stages.len());
            if next == stage {
                let m = snapshot("success", &EpochStats::default(), stage, stage_games, &window, buffer.len())?;
                log.push(m)?;
                let final_checkpoint = match out_dir {
                    Some(d) => {
                        let p = d.join("adversary-final.bin");
                        nnet::save(&adversary, &p)?;
                        p
                    }
                    None => PathBuf::new(),
                };
                return Ok(AttackReport {
                    adversary,
                    final_checkpoint,
                    metrics: log.records,
                    window_records: window_records.into(),
                    games_total,
                    adversary_moves,
                });
            }
            let m = snapshot("advance", &EpochStats::default(), stage, stage_games, &window, buffer.len())?;
            log.push(m)?;
            stage = next;
            stage_games = 0;
            window.clear();
            window_records.clear();
        }

        let epoch = match train_epoch(
            &mut buffer,
            &mut adversary,
            &mut opt,
            config.batch_size,
            config.steps_per_iteration,
            &weights,
            &mut train_rng,
        ) {
            Ok(s) => s,
            // Not enough fresh rows yet: go back to generating games.
            Err(TrainError::Starved { .. }) => EpochStats::default(),
            Err(e) => return Err(e),
        };
        let m = snapshot("iteration", &epoch, stage, stage_games, &window, buffer.len())?;
        log.push(m)?;
        if let Some(d) = out_dir {
            if config.checkpoint_every > 0 && iteration.is_multiple_of(config.checkpoint_every) {
                nnet::save(&adversary, d.join(format!("adversary-{iteration:05}.bin")))?;
            }
        }
    }
}
