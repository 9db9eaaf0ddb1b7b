use std::io::Write;
use std::process::{Command, Stdio};

use rand::RngCore;

use advgo::arena::{
    load_fixture, play_match, Agent, AgentError, ConnectorAgent, MatchConfig, MoveDecision, PassAgent, RandomAgent,
};
use advgo::go::{from_sgf, score_tromp_taylor, Color, GameState, Rules, Vertex};

fn factory<A: Agent + Clone + 'static>(a: A) -> impl Fn() -> Result<Box<dyn Agent>, AgentError> + Sync
where
    A: Sync,
{
    move || Ok(Box::new(a.clone()))
}

#[test]
fn passing_agents_finish_immediately_and_white_wins_on_komi() {
    let config = MatchConfig::new(6, Rules::new(5), 0);
    let out = play_match(&factory(PassAgent), &factory(PassAgent), &config).unwrap();
    assert_eq!(out.records.len(), 6);
    for (r, &a_black) in out.records.iter().zip(&out.a_black) {
        assert_eq!(r.length(), 2);
        assert_eq!(r.score.winner.color(), Some(Color::White));
        assert_eq!(r.points_for(if a_black { Color::Black } else { Color::White }), if a_black { 0.0 } else { 1.0 });
    }
    let s = out.stats.unwrap();
    assert_eq!(s.win_rate, 0.5);
    assert_eq!(s.mean_margin, 0.0);
}

#[test]
fn connector_wins_every_game_from_the_nine_by_nine_fixture() {
    let mut config = MatchConfig::new(20, Rules::new(9), 5);
    config.start = Some(load_fixture("columns-9").unwrap());
    // The connector always takes the fixture's side (Black to move).
    config.a_black_first = true;
    let out = play_match(&factory(ConnectorAgent), &factory(RandomAgent), &config).unwrap();
    for (r, &a_black) in out.records.iter().zip(&out.a_black) {
        let connector = if a_black { Color::Black } else { Color::White };
        if connector == Color::Black {
            assert_eq!(r.score.winner.color(), Some(Color::Black), "{}", r.score);
        }
    }
}

#[test]
fn margins_and_lengths_recompute_from_replays() {
    let config = MatchConfig::new(16, Rules::new(5), 3);
    let out = play_match(&factory(RandomAgent), &factory(ConnectorAgent), &config).unwrap();
    let (mut margin, mut length) = (0.0, 0.0);
    for (r, &a_black) in out.records.iter().zip(&out.a_black) {
        let end = r.replay().unwrap();
        let score = score_tromp_taylor(&end);
        assert_eq!(score, r.score);
        margin += score.lead(if a_black { Color::Black } else { Color::White });
        length += end.move_count() as f64;
    }
    let s = out.stats.unwrap();
    assert!((s.mean_margin - margin / 16.0).abs() < 1e-12);
    assert!((s.mean_length - length / 16.0).abs() < 1e-12);
}

#[test]
fn archived_sgf_files_reproduce_the_games() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = MatchConfig::new(4, Rules::new(5), 8);
    config.sgf_dir = Some(dir.path().to_path_buf());
    let out = play_match(&factory(RandomAgent), &factory(RandomAgent), &config).unwrap();
    for (g, r) in out.records.iter().enumerate() {
        let text = std::fs::read_to_string(dir.path().join(format!("game{g:05}.sgf"))).unwrap();
        assert_eq!(from_sgf(&text).unwrap().hash(), r.final_hash);
    }
}

/// Plays an illegal move on its second turn.
#[derive(Clone)]
struct Cheater;

impl Agent for Cheater {
    fn name(&self) -> String {
        "cheater".into()
    }

    fn select_move(&mut self, state: &GameState, _rng: &mut dyn RngCore) -> Result<MoveDecision, AgentError> {
        let mv = match state.moves().iter().find(|(_, v)| !v.is_pass()) {
            Some(&(_, v)) => v,
            None => Vertex::at(0, 0),
        };
        Ok(MoveDecision::plain(mv))
    }
}

#[test]
fn agent_failures_are_reported_not_counted() {
    let config = MatchConfig::new(4, Rules::new(5), 1);
    let out = play_match(&factory(Cheater), &factory(RandomAgent), &config).unwrap();
    assert!(!out.errors.is_empty());
    assert_eq!(out.records.len() + out.errors.len(), 4);
    if let Some(s) = out.stats {
        assert_eq!(s.games as usize, out.records.len());
    }
}

fn advgo(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_advgo"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn cli_scores_and_analyzes_sgf_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.sgf");
    std::fs::write(&path, "(;FF[4]GM[1]SZ[5]KM[7.5];B[cc];W[];B[])").unwrap();
    let (code, out, _) = advgo(&["score", path.to_str().unwrap()], "");
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "B 25 W 7.5 (B+17.5)");
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/columns-7.sgf");
    let (code, out, _) = advgo(&["benson", fixture], "");
    assert_eq!(code, 0);
    assert!(out.contains("black:") && out.contains("white:"), "{out}");
    let (code, _, err) = advgo(&["score", "/nonexistent.sgf"], "");
    assert_eq!(code, 1);
    assert!(err.starts_with("advgo:"));
}

#[test]
fn cli_eval_reports_json_lines() {
    let (code, out, _) = advgo(&["eval", "connector", "random", "--games", "4", "--fixture", "columns-7"], "");
    assert_eq!(code, 0);
    let lines: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    let summary = lines.last().unwrap();
    assert_eq!(summary["event"], "summary");
    assert_eq!(summary["games"], 4);
    let (code, _, err) = advgo(&["eval", "bogus", "random"], "");
    assert_eq!(code, 1);
    assert!(err.contains("bogus"));
}

#[test]
fn cli_fits_elo_ratings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.txt");
    std::fs::write(&path, "# a beats b three to one\nalpha beta 30 10\n").unwrap();
    let (code, out, _) = advgo(&["elo", path.to_str().unwrap(), "--flat"], "");
    assert_eq!(code, 0);
    let beta: f64 = out.lines().find(|l| l.starts_with("beta")).unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    // Closed form: 400 log10(3) below the anchored first agent.
    assert!((beta + 400.0 * 3f64.log10()).abs() < 0.1, "{out}");
}

#[test]
fn cli_speaks_gtp() {
    let (code, out, _) = advgo(&["gtp", "spiral", "--size", "9"], "protocol_version\nplay b E5\ngenmove w\nquit\n");
    assert_eq!(code, 0);
    let responses: Vec<&str> = out.split("\n\n").filter(|s| !s.is_empty()).collect();
    assert_eq!(responses[0], "= 2");
    assert_eq!(responses[1], "=");
    // Spiral starts in the bottom-left corner.
    assert_eq!(responses[2], "= A1");
    assert_eq!(responses[3], "=");
}
