//! Command-line front end: scoring, analysis, training, evaluation and GTP.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use advgo::arena::{
    analyze_game, elo_fit, gtp_serve, load_fixture, play_match, AgentDescriptor, ConfidentPass, GtpSession,
    MatchConfig, PairResult, CONFIDENT_PASS_WIN_PROBABILITY,
};
use advgo::benson::RegionAnalysis;
use advgo::go::{from_sgf, score_tromp_taylor, Color, GameState, Rules};
use advgo::mcts::Evaluator;
use advgo::nnet;
use advgo::victim_play::{attack_train, load_victims, selfplay_train, AttackConfig, GameRecord, SelfplayConfig};

type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "advgo", version, about = "Adversarial-policy laboratory for Go")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tromp-Taylor score of the final position of an SGF game.
    Score {
        sgf: PathBuf,
        /// Override the komi recorded in the file.
        #[arg(long)]
        komi: Option<f64>,
    },
    /// Pass-alive chains and territory of the final position of an SGF game.
    Benson { sgf: PathBuf },
    /// Grow a victim ladder by ordinary MCTS self-play.
    Selfplay(SelfplayArgs),
    /// Train an adversary against frozen victims.
    AttackTrain {
        /// Flat `key = value` configuration file.
        config: PathBuf,
        /// Output directory for checkpoints and metrics.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Play a match between two agent descriptors and report statistics.
    Eval(EvalArgs),
    /// Fit Elo ratings to pairwise results (`name_a name_b wins_a wins_b [draws]` per line).
    Elo {
        results: PathBuf,
        /// Disable the Gaussian prior on ratings.
        #[arg(long)]
        flat: bool,
    },
    /// Serve the Go Text Protocol on stdin/stdout.
    Gtp {
        agent: String,
        #[arg(long, default_value_t = 19)]
        size: usize,
        #[arg(long, default_value_t = 7.5)]
        komi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Trace a victim's value over a game and flag confident-but-losing positions.
    Analyze {
        sgf: PathBuf,
        /// Victim checkpoint.
        #[arg(long)]
        victim: PathBuf,
        /// Only evaluate positions with this colour to move (black/white).
        #[arg(long)]
        color: Option<String>,
        #[arg(long, default_value_t = CONFIDENT_PASS_WIN_PROBABILITY)]
        threshold: f64,
    },
}

#[derive(Args)]
struct SelfplayArgs {
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    size: usize,
    #[arg(long, default_value_t = 7.5)]
    komi: f64,
    #[arg(long, default_value_t = 2)]
    blocks: usize,
    #[arg(long, default_value_t = 16)]
    channels: usize,
    #[arg(long, default_value_t = 32)]
    playouts: usize,
    #[arg(long, default_value_t = 16)]
    games_per_iteration: usize,
    #[arg(long, default_value_t = 16)]
    steps_per_iteration: u64,
    /// Iterations after which a checkpoint is written.
    #[arg(long, value_delimiter = ',', default_value = "5,15,40")]
    checkpoints: Vec<u64>,
}

#[derive(Args)]
struct EvalArgs {
    /// Agent A descriptor, e.g. `adversary:adv.bin,victim=v.bin`.
    a: String,
    /// Agent B descriptor, e.g. `net:v.bin,hardened`.
    b: String,
    #[arg(long, default_value_t = 100)]
    games: usize,
    #[arg(long, default_value_t = 7)]
    size: usize,
    #[arg(long, default_value_t = 7.5)]
    komi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start every game from a named fixture position.
    #[arg(long)]
    fixture: Option<String>,
    /// Confidence level of the reported interval.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Write each game as `gameNNNNN.sgf` here.
    #[arg(long)]
    sgf_dir: Option<PathBuf>,
}

fn load_sgf(path: &PathBuf) -> Result<GameState, Box<dyn std::error::Error>> {
    Ok(from_sgf(&fs::read_to_string(path)?)?)
}

fn parse_color(s: &str) -> Result<Color, String> {
    match s.to_ascii_lowercase().as_str() {
        "b" | "black" => Ok(Color::Black),
        "w" | "white" => Ok(Color::White),
        _ => Err(format!("bad colour {s:?}")),
    }
}

fn score(sgf: PathBuf, komi: Option<f64>) -> CliResult {
    let state = load_sgf(&sgf)?;
    let score = match komi {
        Some(k) => advgo::go::score_grid(state.grid(), k),
        None => score_tromp_taylor(&state),
    };
    println!("{score}");
    Ok(ExitCode::SUCCESS)
}

fn benson(sgf: PathBuf) -> CliResult {
    let state = load_sgf(&sgf)?;
    let analysis = RegionAnalysis::new(state.grid());
    print!("{}", analysis.diagram(state.grid()));
    for (i, name) in ["black", "white"].iter().enumerate() {
        let stones: usize = analysis.pass_alive_chains[i].iter().map(Vec::len).sum();
        let territory = analysis.pass_alive_territory[i].iter().filter(|&&t| t).count();
        println!(
            "{name}: {} pass-alive chains ({stones} stones), {territory} points of pass-alive territory",
            analysis.pass_alive_chains[i].len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn selfplay(args: SelfplayArgs) -> CliResult {
    let config = SelfplayConfig {
        seed: args.seed,
        board_size: args.size,
        komi: args.komi,
        blocks: args.blocks,
        channels: args.channels,
        playouts: args.playouts,
        games_per_iteration: args.games_per_iteration,
        steps_per_iteration: args.steps_per_iteration,
        checkpoints: args.checkpoints,
        ..SelfplayConfig::default()
    };
    let (nets, metrics) = selfplay_train(&config, Some(&args.out))?;
    let mut log = fs::File::create(args.out.join("metrics.jsonl"))?;
    for m in &metrics {
        writeln!(log, "{}", serde_json::to_string(m)?)?;
    }
    for (label, _) in nets {
        println!("{}", args.out.join(format!("{label}.bin")).display());
    }
    Ok(ExitCode::SUCCESS)
}

fn attack(config: PathBuf, out: PathBuf) -> CliResult {
    let config = AttackConfig::load(&config)?;
    let victims = load_victims(&config)?;
    match attack_train(&config, &victims, Some(&out)) {
        Ok(report) => {
            println!(
                "adversary reached the final victim after {} games; checkpoint {}",
                report.games_total,
                report.final_checkpoint.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("advgo: {e}");
            Ok(ExitCode::from(3))
        }
    }
}

fn eval(args: EvalArgs) -> CliResult {
    let a: AgentDescriptor = args.a.parse()?;
    let b: AgentDescriptor = args.b.parse()?;
    let (a, b) = (a.resolve()?, b.resolve()?);
    let mut config = MatchConfig::new(args.games, Rules::new(args.size).with_komi(args.komi), args.seed);
    config.level = args.level;
    config.sgf_dir = args.sgf_dir;
    if let Some(name) = &args.fixture {
        let start = load_fixture(name)?;
        config.rules = *start.rules();
        config.start = Some(start);
    }
    let outcome = play_match(&a, &b, &config)?;
    let mut out = io::stdout().lock();
    for (g, (record, &a_black)) in outcome.records.iter().zip(&outcome.a_black).enumerate() {
        let line = json!({
            "event": "game",
            "index": g,
            "a_black": a_black,
            "result": record.score.result_string(),
            "length": record.length(),
        });
        writeln!(out, "{line}")?;
    }
    for (g, msg) in &outcome.errors {
        writeln!(out, "{}", json!({"event": "error", "index": g, "message": msg}))?;
    }
    if let Some(s) = &outcome.stats {
        let line = json!({
            "event": "summary",
            "a": a.descriptor.to_string(),
            "b": b.descriptor.to_string(),
            "games": s.games,
            "wins_a": s.wins,
            "win_rate_a": s.win_rate,
            "ci_low": s.ci_low,
            "ci_high": s.ci_high,
            "level": s.level,
            "mean_margin_a": s.mean_margin,
            "mean_length": s.mean_length,
            "forward_passes_per_move_a": s.forward_passes_per_move_a,
            "forward_passes_per_move_b": s.forward_passes_per_move_b,
        });
        writeln!(out, "{line}")?;
    }
    Ok(if outcome.errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn elo(results: PathBuf, flat: bool) -> CliResult {
    let text = fs::read_to_string(&results)?;
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if !(4..=5).contains(&f.len()) {
            return Err(format!("line {}: expected `name_a name_b wins_a wins_b [draws]`", n + 1).into());
        }
        let mut id = |s: &str| {
            *names.entry(s.to_string()).or_insert_with(|| {
                order.push(s.to_string());
                order.len() - 1
            })
        };
        let (i, j) = (id(f[0]), id(f[1]));
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("line {}: bad count {s:?}", n + 1));
        pairs.push(PairResult {
            i,
            j,
            wins_i: num(f[2])?,
            wins_j: num(f[3])?,
            draws: f.get(4).map(|s| num(s)).transpose()?.unwrap_or(0.0),
        });
    }
    let prior = if flat { None } else { Some(advgo::arena::ELO_PRIOR_SIGMA) };
    let table = elo_fit(order.len(), &pairs, prior)?;
    println!("{:<24} {:>9} {:>8}", "agent", "elo", "stderr");
    for (k, name) in order.iter().enumerate() {
        println!("{name:<24} {:>9.1} {:>8.1}", table.ratings[k], table.std_errors[k]);
    }
    Ok(ExitCode::SUCCESS)
}

fn gtp(agent: String, size: usize, komi: f64, seed: u64) -> CliResult {
    let descriptor: AgentDescriptor = agent.parse()?;
    let agent = descriptor.resolve()?.agent();
    let mut session = GtpSession::new(agent, Rules::new(size).with_komi(komi), seed)?;
    gtp_serve(&mut session, io::stdin().lock(), io::stdout().lock())?;
    Ok(ExitCode::SUCCESS)
}

fn analyze(sgf: PathBuf, victim: PathBuf, color: Option<String>, threshold: f64) -> CliResult {
    let state = load_sgf(&sgf)?;
    let color = color.as_deref().map(parse_color).transpose()?;
    let net = Arc::new(nnet::load(&victim)?);
    let evaluator: Arc<dyn Evaluator> = Arc::new(ConfidentPass { inner: net, threshold });
    let record = GameRecord::from_state(&state, "black", "white");
    let trace = analyze_game(&record, evaluator.as_ref(), color, threshold)?;
    let mut out = io::stdout().lock();
    for p in &trace {
        let line = json!({
            "move": p.move_number,
            "to_move": if p.to_move == Color::Black { "black" } else { "white" },
            "value": p.value,
            "loses_on_double_pass": p.loses_on_double_pass,
            "flagged": p.flagged,
        });
        writeln!(out, "{line}")?;
    }
    let flagged = trace.iter().filter(|p| p.flagged).count();
    writeln!(out, "{}", json!({"positions": trace.len(), "flagged": flagged, "result": record.score.result_string()}))?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Score { sgf, komi } => score(sgf, komi),
        Command::Benson { sgf } => benson(sgf),
        Command::Selfplay(args) => selfplay(args),
        Command::AttackTrain { config, out } => attack(config, out),
        Command::Eval(args) => eval(args),
        Command::Elo { results, flat } => elo(results, flat),
        Command::Gtp { agent, size, komi, seed } => gtp(agent, size, komi, seed),
        Command::Analyze { sgf, victim, color, threshold } => analyze(sgf, victim, color, threshold),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("advgo: {e}");
            ExitCode::FAILURE
        }
    }
}
