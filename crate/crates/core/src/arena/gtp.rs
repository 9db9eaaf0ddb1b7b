//! Go Text Protocol front end for any agent (single session, sequential).

use std::io::{self, BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::agents::Agent;
use crate::go::{score_tromp_taylor, Color, GameState, Rules, Vertex};

const COMMANDS: [&str; 13] = [
    "protocol_version",
    "name",
    "version",
    "known_command",
    "list_commands",
    "boardsize",
    "komi",
    "clear_board",
    "play",
    "genmove",
    "final_score",
    "showboard",
    "quit",
];

/// GTP session state: one agent, one game.
pub struct GtpSession {
    agent: Box<dyn Agent>,
    rules: Rules,
    state: GameState,
    rng: ChaCha8Rng,
    quit: bool,
}

fn parse_color(s: &str) -> Option<Color> {
    match s.to_ascii_lowercase().as_str() {
        "b" | "black" => Some(Color::Black),
        "w" | "white" => Some(Color::White),
        _ => None,
    }
}

impl GtpSession {
    pub fn new(agent: Box<dyn Agent>, rules: Rules, seed: u64) -> io::Result<GtpSession> {
        let state = GameState::new(rules).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
        let mut agent = agent;
        agent.new_game();
        Ok(GtpSession { agent, rules, state, rng: ChaCha8Rng::seed_from_u64(seed), quit: false })
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn finished(&self) -> bool {
        self.quit
    }

    fn reset(&mut self) {
        self.state = GameState::new(self.rules).expect("rules validated");
        self.agent.new_game();
    }

    /// Execute one command (without id); `Ok` text goes after `=`, `Err`
    /// text after `?`.
    fn execute(&mut self, cmd: &str, args: &[&str]) -> Result<String, String> {
        match cmd {
            "protocol_version" => Ok("2".into()),
            "name" => Ok(format!("advgo {}", self.agent.name())),
            "version" => Ok(env!("CARGO_PKG_VERSION").into()),
            "known_command" => Ok(COMMANDS.contains(&args.first().copied().unwrap_or("")).to_string()),
            "list_commands" => Ok(COMMANDS.join("\n")),
            "boardsize" => {
                let n: usize = args.first().and_then(|a| a.parse().ok()).ok_or("syntax error")?;
                let rules = Rules::new(n).with_komi(self.rules.komi).with_suicide(self.rules.suicide_allowed);
                if rules.validate().is_err() {
                    return Err("unacceptable size".into());
                }
                self.rules = rules;
                self.reset();
                Ok(String::new())
            }
            "komi" => {
                let k: f64 = args.first().and_then(|a| a.parse().ok()).ok_or("syntax error")?;
                self.rules = self.rules.with_komi(k);
                let moves: Vec<Vertex> = self.state.moves().iter().map(|&(_, v)| v).collect();
                let setup = self.state.setup().clone();
                let mut s = GameState::from_setup(self.rules, setup.grid, setup.to_move).map_err(|e| e.to_string())?;
                for v in moves {
                    s = s.play(v).map_err(|e| e.to_string())?;
                }
                self.state = s;
                Ok(String::new())
            }
            "clear_board" => {
                self.reset();
                Ok(String::new())
            }
            "play" => {
                let (Some(c), Some(v)) = (args.first(), args.get(1)) else {
                    return Err("syntax error".into());
                };
                let color = parse_color(c).ok_or("syntax error")?;
                let v = Vertex::from_gtp(v, self.state.size()).ok_or("syntax error")?;
                if color != self.state.to_move() || self.state.is_terminal() || !self.state.is_legal(v) {
                    return Err("illegal move".into());
                }
                self.state = self.state.play(v).map_err(|e| e.to_string())?;
                Ok(String::new())
            }
            "genmove" => {
                let color = args.first().and_then(|c| parse_color(c)).ok_or("syntax error")?;
                if color != self.state.to_move() {
                    return Err("not that colour's turn".into());
                }
                if self.state.is_terminal() {
                    return Ok("pass".into());
                }
                let d = self.agent.select_move(&self.state, &mut self.rng).map_err(|e| e.to_string())?;
                if !self.state.is_legal(d.mv) {
                    return Err(format!("agent chose illegal move {}", d.mv.to_gtp(self.state.size())));
                }
                self.state = self.state.play(d.mv).map_err(|e| e.to_string())?;
                Ok(d.mv.to_gtp(self.state.size()))
            }
            "final_score" => Ok(score_tromp_taylor(&self.state).result_string()),
            "showboard" => Ok(format!("\n{}", self.state.grid().diagram().trim_end())),
            "quit" => {
                self.quit = true;
                Ok(String::new())
            }
            _ => Err("unknown command".into()),
        }
    }

    /// Full response (including the blank-line terminator) to one input
    /// line, or `None` for lines that carry no command.
    pub fn respond(&mut self, line: &str) -> Option<String> {
        let cleaned: String = line
            .split('#')
            .next()
            .unwrap_or("")
            .chars()
            .filter(|&c| c == '\t' || c == ' ' || !c.is_control())
            .map(|c| if c == '\t' { ' ' } else { c })
            .collect();
        let mut words: Vec<&str> = cleaned.split_whitespace().collect();
        if words.is_empty() {
            return None;
        }
        let id = if words[0].chars().all(|c| c.is_ascii_digit()) { Some(words.remove(0)) } else { None };
        let Some((&cmd, args)) = words.split_first() else {
            return Some(format!("?{} syntax error\n\n", id.unwrap_or("")));
        };
        let id = id.unwrap_or("");
        Some(match self.execute(cmd, args) {
            Ok(text) if text.is_empty() => format!("={id}\n\n"),
            Ok(text) => format!("={id} {text}\n\n"),
            Err(text) => format!("?{id} {text}\n\n"),
        })
    }
}

/// Serve GTP on the given streams until `quit` or end of input.
pub fn gtp_serve(session: &mut GtpSession, input: impl BufRead, mut output: impl Write) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if let Some(resp) = session.respond(&line) {
            output.write_all(resp.as_bytes())?;
            output.flush()?;
        }
        if session.finished() {
            break;
        }
    }
    Ok(())
}
