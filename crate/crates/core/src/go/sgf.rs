//! SGF (FF[4]) subset: `SZ`, `KM`, `B`, `W`, `RE`, plus `AB`/`AW`/`PL` setup
//! in the root node. Only the main variation is read; other properties are
//! accepted and ignored.

use thiserror::Error;

use super::grid::Grid;
use super::score::score_tromp_taylor;
use super::types::{Color, Point, Rules, Vertex};
use super::GameState;

#[derive(Debug, Error, PartialEq)]
#[error("SGF parse error at line {line}, column {column}: {message}")]
pub struct SgfError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn coord(p: Point) -> String {
    let a = (b'a' + p.col) as char;
    let b = (b'a' + p.row) as char;
    format!("{a}{b}")
}

/// Canonical SGF for a game: fixed property order, setup stones in row-major
/// order, `RE` present only for finished games.
pub fn to_sgf(state: &GameState) -> String {
    let rules = state.rules();
    let n = rules.board_size;
    let mut out = format!(
        "(;FF[4]GM[1]SZ[{n}]KM[{}]RU[Tromp-Taylor]",
        rules.komi
    );
    if state.is_terminal() {
        out.push_str(&format!("RE[{}]", score_tromp_taylor(state).result_string()));
    }
    let setup = state.setup();
    for (tag, color) in [("AB", Color::Black), ("AW", Color::White)] {
        let stones: Vec<String> = (0..n * n)
            .filter(|&i| setup.grid.get_index(i) == Some(color))
            .map(|i| format!("[{}]", coord(Point::from_index(i, n))))
            .collect();
        if !stones.is_empty() {
            out.push_str(tag);
            out.push_str(&stones.concat());
        }
    }
    if setup.to_move == Color::White {
        out.push_str("PL[W]");
    }
    out.push('\n');
    for (i, &(color, v)) in state.moves().iter().enumerate() {
        let value = match v {
            Vertex::Pass => String::new(),
            Vertex::At(p) => coord(p),
        };
        out.push_str(&format!(";{}[{}]", color.sgf_letter(), value));
        if i % 10 == 9 {
            out.push('\n');
        }
    }
    out.push_str(")\n");
    out
}

struct Prop {
    ident: String,
    values: Vec<String>,
    offset: usize,
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, offset: usize, message: impl Into<String>) -> SgfError {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
        SgfError { offset, line, column, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), SgfError> {
        match self.peek() {
            Some(x) if x == b => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(self.pos, format!("expected '{}', found '{}'", b as char, x as char))),
            None => Err(self.error(self.pos, format!("expected '{}', found end of input", b as char))),
        }
    }

    fn value(&mut self) -> Result<String, SgfError> {
        self.expect(b'[')?;
        let start = self.pos;
        let mut out = String::new();
        loop {
            let Some(&b) = self.bytes.get(self.pos) else {
                return Err(self.error(start, "unterminated property value"));
            };
            match b {
                b']' => {
                    self.pos += 1;
                    return Ok(out);
                }
                b'\\' => {
                    let ch = self.text[self.pos + 1..].chars().next();
                    match ch {
                        Some(c) => {
                            out.push(c);
                            self.pos += 1 + c.len_utf8();
                        }
                        None => return Err(self.error(self.pos, "dangling escape")),
                    }
                }
                _ => {
                    let c = self.text[self.pos..].chars().next().expect("in bounds");
                    out.push(c);
                    self.pos += c.len_utf8();
                }
            }
        }
    }

    fn node(&mut self) -> Result<Vec<Prop>, SgfError> {
        self.expect(b';')?;
        let mut props = Vec::new();
        while let Some(b) = self.peek() {
            if !b.is_ascii_uppercase() {
                if b.is_ascii_lowercase() {
                    return Err(self.error(self.pos, "property identifiers must be upper case"));
                }
                break;
            }
            let offset = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_uppercase() {
                self.pos += 1;
            }
            let ident = self.text[offset..self.pos].to_string();
            let mut values = Vec::new();
            while self.peek() == Some(b'[') {
                values.push(self.value()?);
            }
            if values.is_empty() {
                return Err(self.error(self.pos, format!("property {ident} has no value")));
            }
            props.push(Prop { ident, values, offset });
        }
        Ok(props)
    }

    /// Main line of a game tree: its sequence, then the first child variation.
    fn main_line(&mut self, out: &mut Vec<Vec<Prop>>) -> Result<(), SgfError> {
        self.expect(b'(')?;
        while self.peek() == Some(b';') {
            out.push(self.node()?);
        }
        let mut first = true;
        while self.peek() == Some(b'(') {
            if first {
                self.main_line(out)?;
                first = false;
            } else {
                self.main_line(&mut Vec::new())?;
            }
        }
        self.expect(b')')
    }
}

fn parse_point(p: &Parser, prop: &Prop, value: &str, n: usize) -> Result<Option<Point>, SgfError> {
    if value.is_empty() || (value == "tt" && n <= 19) {
        return Ok(None);
    }
    let b = value.as_bytes();
    if b.len() != 2 || !b[0].is_ascii_lowercase() || !b[1].is_ascii_lowercase() {
        return Err(p.error(prop.offset, format!("bad coordinate '{value}'")));
    }
    let (col, row) = ((b[0] - b'a') as usize, (b[1] - b'a') as usize);
    if col >= n || row >= n {
        return Err(p.error(prop.offset, format!("coordinate '{value}' off the {n}x{n} board")));
    }
    Ok(Some(Point::new(row, col)))
}

pub fn from_sgf(text: &str) -> Result<GameState, SgfError> {
    let mut p = Parser { text, bytes: text.as_bytes(), pos: 0 };
    let mut nodes = Vec::new();
    p.main_line(&mut nodes)?;
    if p.peek().is_some() && p.peek() != Some(b'(') {
        return Err(p.error(p.pos, "trailing data after game tree"));
    }
    let Some(root) = nodes.first() else {
        return Err(p.error(0, "empty game tree"));
    };

    let mut size = 19;
    let mut komi = 7.5;
    for prop in root {
        match prop.ident.as_str() {
            "SZ" => {
                size = prop.values[0]
                    .trim()
                    .parse()
                    .map_err(|_| p.error(prop.offset, "SZ is not an integer"))?;
            }
            "KM" => {
                komi = prop.values[0]
                    .trim()
                    .parse()
                    .map_err(|_| p.error(prop.offset, "KM is not a number"))?;
            }
            _ => {}
        }
    }
    let rules = Rules::new(size).with_komi(komi);
    rules.validate().map_err(|e| p.error(0, e.to_string()))?;

    let mut grid = Grid::new(size);
    let mut to_move = Color::Black;
    for prop in root {
        match prop.ident.as_str() {
            "AB" | "AW" => {
                let c = if prop.ident == "AB" { Color::Black } else { Color::White };
                for v in &prop.values {
                    let pt = parse_point(&p, prop, v, size)?
                        .ok_or_else(|| p.error(prop.offset, "setup stone cannot be a pass"))?;
                    grid.set(pt, Some(c));
                }
            }
            "PL" => {
                to_move = match prop.values[0].trim() {
                    "B" | "b" => Color::Black,
                    "W" | "w" => Color::White,
                    other => return Err(p.error(prop.offset, format!("bad PL value '{other}'"))),
                };
            }
            _ => {}
        }
    }
    let mut state = GameState::from_setup(rules, grid, to_move)
        .map_err(|e| p.error(0, e.to_string()))?;

    for node in &nodes {
        for prop in node {
            let color = match prop.ident.as_str() {
                "B" => Color::Black,
                "W" => Color::White,
                _ => continue,
            };
            if color != state.to_move() {
                return Err(p.error(prop.offset, format!("{color} played out of turn")));
            }
            let v = match parse_point(&p, prop, &prop.values[0], size)? {
                Some(pt) => Vertex::At(pt),
                None => Vertex::Pass,
            };
            state = state
                .play(v)
                .map_err(|e| p.error(prop.offset, e.to_string()))?;
        }
    }
    Ok(state)
}
