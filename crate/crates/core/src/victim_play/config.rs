use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::amcts::{AMctsConfig, AMctsMode};
use crate::arena::CONFIDENT_PASS_WIN_PROBABILITY;
use crate::go::Rules;
use crate::mcts::SearchConfig;
use crate::nnet::Arch;

use super::TrainError;

/// Every knob of an attack run. Loaded from a flat `key = value` file;
/// unspecified keys keep their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackConfig {
    pub seed: u64,
    pub board_size: usize,
    pub komi: f64,
    /// Victim checkpoints, weakest first.
    pub victims: Vec<PathBuf>,
    /// Victim pass threshold on win probability; `None` disables it.
    pub victim_confident_pass: Option<f64>,
    pub victim_tau: f64,
    pub adversary_blocks: usize,
    pub adversary_channels: usize,
    pub amcts_mode: AMctsMode,
    pub adversary_visits: usize,
    /// Victim visits used inside A-MCTS-R.
    pub victim_visits: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Adversary move temperature while generating training games.
    pub train_tau: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// SGD step after which the learning rate drops tenfold.
    pub lr_decay_at: Option<u64>,
    pub buffer_capacity: usize,
    pub min_rows: usize,
    pub reuse: u32,
    pub games_per_iteration: usize,
    pub steps_per_iteration: u64,
    pub window: usize,
    /// Total game budget over the whole curriculum.
    pub max_games: u64,
    /// Write an adversary checkpoint every this many iterations (0 = never).
    pub checkpoint_every: u64,
    pub archive_sgf: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            seed: 0,
            board_size: 7,
            komi: 7.5,
            victims: Vec::new(),
            victim_confident_pass: Some(CONFIDENT_PASS_WIN_PROBABILITY),
            victim_tau: 0.0,
            adversary_blocks: 2,
            adversary_channels: 16,
            amcts_mode: AMctsMode::Sample,
            adversary_visits: 64,
            victim_visits: 8,
            alpha: 1.1,
            beta: 0.2,
            train_tau: 1.0,
            batch_size: 256,
            learning_rate: 0.01,
            momentum: 0.9,
            lr_decay_at: None,
            buffer_capacity: 50_000,
            min_rows: 10_000,
            reuse: 4,
            games_per_iteration: 20,
            steps_per_iteration: 40,
            window: 100,
            max_games: 5_000,
            checkpoint_every: 10,
            archive_sgf: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, TrainError> {
    value.parse().map_err(|_| TrainError::Config(format!("bad value for {key}: {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, TrainError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(TrainError::Config(format!("bad value for {key}: {value:?}"))),
    }
}

fn parse_optional<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, TrainError> {
    if value == "none" || value == "off" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

impl AttackConfig {
    /// Parse `key = value` lines; `#` starts a comment. Relative victim
    /// paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<AttackConfig, TrainError> {
        let mut c = AttackConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| TrainError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => c.seed = parse(key, value)?,
                "board_size" => c.board_size = parse(key, value)?,
                "komi" => c.komi = parse(key, value)?,
                "victims" => {
                    c.victims = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| base.join(s)).collect()
                }
                "victim_confident_pass" => c.victim_confident_pass = parse_optional(key, value)?,
                "victim_tau" => c.victim_tau = parse(key, value)?,
                "adversary_blocks" => c.adversary_blocks = parse(key, value)?,
                "adversary_channels" => c.adversary_channels = parse(key, value)?,
                "amcts_mode" => {
                    c.amcts_mode = value.parse().map_err(TrainError::Config)?
                }
                "adversary_visits" => c.adversary_visits = parse(key, value)?,
                "victim_visits" => c.victim_visits = parse(key, value)?,
                "alpha" => c.alpha = parse(key, value)?,
                "beta" => c.beta = parse(key, value)?,
                "train_tau" => c.train_tau = parse(key, value)?,
                "batch_size" => c.batch_size = parse(key, value)?,
                "learning_rate" => c.learning_rate = parse(key, value)?,
                "momentum" => c.momentum = parse(key, value)?,
                "lr_decay_at" => c.lr_decay_at = parse_optional(key, value)?,
                "buffer_capacity" => c.buffer_capacity = parse(key, value)?,
                "min_rows" => c.min_rows = parse(key, value)?,
                "reuse" => c.reuse = parse(key, value)?,
                "games_per_iteration" => c.games_per_iteration = parse(key, value)?,
                "steps_per_iteration" => c.steps_per_iteration = parse(key, value)?,
                "window" => c.window = parse(key, value)?,
                "max_games" => c.max_games = parse(key, value)?,
                "checkpoint_every" => c.checkpoint_every = parse(key, value)?,
                "archive_sgf" => c.archive_sgf = parse_bool(key, value)?,
                _ => return Err(TrainError::Config(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<AttackConfig, TrainError> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        AttackConfig::parse(&text, base)
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        self.rules().validate().map_err(|e| TrainError::Config(e.to_string()))?;
        self.arch().validate().map_err(|e| TrainError::Config(e.to_string()))?;
        self.amcts(self.train_tau).validate().map_err(|e| TrainError::Config(e.to_string()))?;
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.reuse == 0 {
            return bad("reuse must be positive");
        }
        if self.window == 0 {
            return bad("window must be positive");
        }
        if self.games_per_iteration == 0 {
            return bad("games_per_iteration must be positive");
        }
        if self.min_rows < self.batch_size {
            return bad("min_rows must be at least batch_size");
        }
        if self.buffer_capacity < self.min_rows {
            return bad("buffer_capacity must be at least min_rows");
        }
        Ok(())
    }

    pub fn rules(&self) -> Rules {
        Rules::new(self.board_size).with_komi(self.komi)
    }

    pub fn arch(&self) -> Arch {
        Arch::new(self.adversary_blocks, self.adversary_channels, self.board_size)
    }

    pub fn amcts(&self, tau: f64) -> AMctsConfig {
        AMctsConfig {
            mode: self.amcts_mode,
            search: SearchConfig {
                playouts: self.adversary_visits,
                alpha: self.alpha,
                beta: self.beta,
                tau,
                ..SearchConfig::default()
            },
            victim_visits: self.victim_visits,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let text = "# attack\nseed = 7\nvictims = a.bin, b.bin\nadversary_visits=32 # fewer\nlr_decay_at = none\namcts_mode = S++\nmin_rows = 256\n";
        let c = AttackConfig::parse(text, Path::new("/tmp/x")).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.victims, vec![PathBuf::from("/tmp/x/a.bin"), PathBuf::from("/tmp/x/b.bin")]);
        assert_eq!(c.adversary_visits, 32);
        assert_eq!(c.amcts_mode, AMctsMode::SamplePlusPlus);
        assert_eq!(c.lr_decay_at, None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(AttackConfig::parse("colour = red", Path::new(".")), Err(TrainError::Config(_))));
        assert!(matches!(AttackConfig::parse("seed = x", Path::new(".")), Err(TrainError::Config(_))));
        assert!(matches!(AttackConfig::parse("min_rows = 3", Path::new(".")), Err(TrainError::Config(_))));
    }
}
