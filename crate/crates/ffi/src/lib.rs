//! C ABI over the advgo rules engine, pass-alive analysis, networks and
//! agents.
//!
//! Every object is an opaque handle created by an `advgo_*_new`/`_load`
//! function and released with the matching `_free`. Functions return an
//! [`AdvgoStatus`]; on failure a description is available from
//! [`advgo_last_error`] on the same thread. Vertices are encoded as
//! `row * size + col` (row 0 at the top) and pass as `size * size`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use advgo::arena::{Agent, AgentDescriptor};
use advgo::benson::{pass_alive_mask, pass_alive_territory};
use advgo::go::{from_sgf, score_tromp_taylor, to_sgf, Color, GameState, Rules, Vertex, Winner};
use advgo::mcts::Evaluator;
use advgo::nnet::{self, Network};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdvgoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IllegalMove = 3,
    BufferTooSmall = 4,
    Io = 5,
    Parse = 6,
    Agent = 7,
    Panic = 8,
}

/// Board colours; `Empty` is only used for board contents.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AdvgoColor {
    #[default]
    Empty = 0,
    Black = 1,
    White = 2,
}

/// A game in progress (rules, position and history).
pub struct AdvgoGame {
    state: GameState,
}

/// A policy/value network checkpoint.
pub struct AdvgoNetwork {
    net: Network,
}

/// A move-choosing agent built from a descriptor string, with its own RNG.
pub struct AdvgoAgent {
    agent: Box<dyn Agent>,
    rng: ChaCha8Rng,
}

/// Tromp-Taylor score; `white_points` includes komi.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AdvgoScore {
    pub black_points: f64,
    pub white_points: f64,
    /// Winner, or `Empty` for a draw.
    pub winner: AdvgoColor,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(AdvgoStatus, String);

impl Failure {
    fn new(status: AdvgoStatus, msg: impl ToString) -> Failure {
        Failure(status, msg.to_string())
    }
}

/// Run `f`, translating failures and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AdvgoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AdvgoStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AdvgoStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::new(AdvgoStatus::NullPointer, "null handle"))
}

unsafe fn obj_mut<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::new(AdvgoStatus::NullPointer, "null handle"))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::new(AdvgoStatus::NullPointer, "null output pointer"))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(AdvgoStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::new(AdvgoStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn buffer<'a, T>(p: *mut T, len: usize, need: usize) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(Failure::new(AdvgoStatus::NullPointer, "null buffer"));
    }
    if len < need {
        return Err(Failure::new(AdvgoStatus::BufferTooSmall, format!("buffer holds {len}, need {need}")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

fn vertex(state: &GameState, v: u32) -> Result<Vertex, Failure> {
    let n = state.size();
    if v as usize > n * n {
        return Err(Failure::new(AdvgoStatus::InvalidArgument, format!("vertex {v} out of range")));
    }
    Ok(Vertex::from_index(v as usize, n))
}

fn color_of(c: Color) -> AdvgoColor {
    match c {
        Color::Black => AdvgoColor::Black,
        Color::White => AdvgoColor::White,
    }
}

fn stone_color(c: AdvgoColor) -> Result<Color, Failure> {
    match c {
        AdvgoColor::Black => Ok(Color::Black),
        AdvgoColor::White => Ok(Color::White),
        AdvgoColor::Empty => Err(Failure::new(AdvgoStatus::InvalidArgument, "expected a stone colour")),
    }
}

fn into_handle<T>(value: T, slot: &mut *mut T) {
    *slot = Box::into_raw(Box::new(value));
}

/// Message describing the last failed call on this thread, or NULL. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn advgo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn advgo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Start an empty game on a `size` x `size` board.
///
/// # Safety
/// `game_out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_new(size: u32, komi: f64, game_out: *mut *mut AdvgoGame) -> AdvgoStatus {
    guard(|| {
        let slot = out(game_out)?;
        let rules = Rules::new(size as usize).with_komi(komi);
        let state = GameState::new(rules).map_err(|e| Failure::new(AdvgoStatus::InvalidArgument, e))?;
        into_handle(AdvgoGame { state }, slot);
        Ok(())
    })
}

/// Load a game (setup stones plus main-line moves) from SGF text.
///
/// # Safety
/// `sgf` must be a NUL-terminated string; `game_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_from_sgf(sgf: *const c_char, game_out: *mut *mut AdvgoGame) -> AdvgoStatus {
    guard(|| {
        let slot = out(game_out)?;
        let state = from_sgf(text(sgf)?).map_err(|e| Failure::new(AdvgoStatus::Parse, e))?;
        into_handle(AdvgoGame { state }, slot);
        Ok(())
    })
}

/// Release a game.
///
/// # Safety
/// `game` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_free(game: *mut AdvgoGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Board side length, or 0 for a NULL handle.
///
/// # Safety
/// `game` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_size(game: *const AdvgoGame) -> u32 {
    game.as_ref().map_or(0, |g| g.state.size() as u32)
}

/// Colour to move.
///
/// # Safety
/// `game` must be a live handle; `color_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_to_move(game: *const AdvgoGame, color_out: *mut AdvgoColor) -> AdvgoStatus {
    guard(|| {
        *out(color_out)? = color_of(obj(game)?.state.to_move());
        Ok(())
    })
}

/// Whether the game has ended (two consecutive passes or the turn limit).
///
/// # Safety
/// `game` must be a live handle; `terminal_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_is_terminal(game: *const AdvgoGame, terminal_out: *mut bool) -> AdvgoStatus {
    guard(|| {
        *out(terminal_out)? = obj(game)?.state.is_terminal();
        Ok(())
    })
}

/// Whether `vertex` is a legal move for the side to move.
///
/// # Safety
/// `game` must be a live handle; `legal_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_is_legal(game: *const AdvgoGame, vertex_index: u32, legal_out: *mut bool) -> AdvgoStatus {
    guard(|| {
        let g = obj(game)?;
        let v = vertex(&g.state, vertex_index)?;
        *out(legal_out)? = !g.state.is_terminal() && g.state.is_legal(v);
        Ok(())
    })
}

/// Play `vertex` for the side to move; the game is unchanged on failure.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_play(game: *mut AdvgoGame, vertex_index: u32) -> AdvgoStatus {
    guard(|| {
        let g = obj_mut(game)?;
        let v = vertex(&g.state, vertex_index)?;
        g.state = g.state.play(v).map_err(|e| Failure::new(AdvgoStatus::IllegalMove, e))?;
        Ok(())
    })
}

/// Copy the board (`size * size` entries, row-major) into `board_out`.
///
/// # Safety
/// `game` must be a live handle; `board_out` must hold `len` entries.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_board(game: *const AdvgoGame, board_out: *mut AdvgoColor, len: usize) -> AdvgoStatus {
    guard(|| {
        let g = obj(game)?;
        let grid = g.state.grid();
        let buf = buffer(board_out, len, grid.area())?;
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = grid.get_index(i).map_or(AdvgoColor::Empty, color_of);
        }
        Ok(())
    })
}

/// Tromp-Taylor score of the current position.
///
/// # Safety
/// `game` must be a live handle; `score_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_score(game: *const AdvgoGame, score_out: *mut AdvgoScore) -> AdvgoStatus {
    guard(|| {
        let s = score_tromp_taylor(&obj(game)?.state);
        *out(score_out)? = AdvgoScore {
            black_points: s.black_points,
            white_points: s.white_points,
            winner: match s.winner {
                Winner::Black => AdvgoColor::Black,
                Winner::White => AdvgoColor::White,
                Winner::Draw => AdvgoColor::Empty,
            },
        };
        Ok(())
    })
}

/// Serialize the game as SGF; free the result with [`advgo_string_free`].
///
/// # Safety
/// `game` must be a live handle; `sgf_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_game_to_sgf(game: *const AdvgoGame, sgf_out: *mut *mut c_char) -> AdvgoStatus {
    guard(|| {
        let slot = out(sgf_out)?;
        let sgf = to_sgf(&obj(game)?.state);
        *slot = CString::new(sgf).map_err(|e| Failure::new(AdvgoStatus::InvalidArgument, e))?.into_raw();
        Ok(())
    })
}

/// Mark (1) every stone of `color` in a pass-alive chain, 0 elsewhere.
///
/// # Safety
/// `game` must be a live handle; `mask_out` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn advgo_pass_alive_stones(
    game: *const AdvgoGame,
    color: AdvgoColor,
    mask_out: *mut u8,
    len: usize,
) -> AdvgoStatus {
    guard(|| {
        let grid = obj(game)?.state.grid();
        let mask = pass_alive_mask(grid, stone_color(color)?);
        let buf = buffer(mask_out, len, mask.len())?;
        for (slot, m) in buf.iter_mut().zip(mask) {
            *slot = m as u8;
        }
        Ok(())
    })
}

/// Mark (1) every empty point of `color`'s pass-alive territory.
///
/// # Safety
/// `game` must be a live handle; `mask_out` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn advgo_pass_alive_territory(
    game: *const AdvgoGame,
    color: AdvgoColor,
    mask_out: *mut u8,
    len: usize,
) -> AdvgoStatus {
    guard(|| {
        let grid = obj(game)?.state.grid();
        let mask = pass_alive_territory(grid, stone_color(color)?);
        let buf = buffer(mask_out, len, mask.len())?;
        for (slot, m) in buf.iter_mut().zip(mask) {
            *slot = m as u8;
        }
        Ok(())
    })
}

/// Load a network checkpoint from `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `net_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_network_load(path: *const c_char, net_out: *mut *mut AdvgoNetwork) -> AdvgoStatus {
    guard(|| {
        let slot = out(net_out)?;
        let net = nnet::load(text(path)?).map_err(|e| Failure::new(AdvgoStatus::Io, e))?;
        into_handle(AdvgoNetwork { net }, slot);
        Ok(())
    })
}

/// Release a network.
///
/// # Safety
/// `net` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn advgo_network_free(net: *mut AdvgoNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Evaluate the game position: writes the value (side to move's
/// perspective, in [-1, 1]) and the move distribution over `size*size + 1`
/// entries (pass last).
///
/// # Safety
/// Handles must be live; `value_out` writable; `policy_out` must hold `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn advgo_network_evaluate(
    net: *const AdvgoNetwork,
    game: *const AdvgoGame,
    value_out: *mut f64,
    policy_out: *mut f64,
    len: usize,
) -> AdvgoStatus {
    guard(|| {
        let net = &obj(net)?.net;
        let state = &obj(game)?.state;
        if net.arch().board_size != state.size() {
            return Err(Failure::new(AdvgoStatus::InvalidArgument, "network and game board sizes differ"));
        }
        let value = out(value_out)?;
        let policy = buffer(policy_out, len, state.size() * state.size() + 1)?;
        let legal = state.legal_mask().map_err(|e| Failure::new(AdvgoStatus::IllegalMove, e))?;
        let r = net.evaluate(state, &legal).map_err(|e| Failure::new(AdvgoStatus::Agent, e))?;
        *value = r.value;
        policy.copy_from_slice(&r.policy);
        Ok(())
    })
}

/// Build an agent from a descriptor such as `spiral`, `net:v.bin,visits=64`
/// or `adversary:a.bin,victim=v.bin,mode=S`.
///
/// # Safety
/// `descriptor` must be a NUL-terminated string; `agent_out` writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_agent_new(descriptor: *const c_char, seed: u64, agent_out: *mut *mut AdvgoAgent) -> AdvgoStatus {
    guard(|| {
        let slot = out(agent_out)?;
        let d: AgentDescriptor = text(descriptor)?.parse().map_err(|e| Failure::new(AdvgoStatus::Parse, e))?;
        let mut agent = d.resolve().map_err(|e| Failure::new(AdvgoStatus::Io, e))?.agent();
        agent.new_game();
        into_handle(AdvgoAgent { agent, rng: ChaCha8Rng::seed_from_u64(seed) }, slot);
        Ok(())
    })
}

/// Release an agent.
///
/// # Safety
/// `agent` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn advgo_agent_free(agent: *mut AdvgoAgent) {
    if !agent.is_null() {
        drop(Box::from_raw(agent));
    }
}

/// Tell the agent a new game is starting.
///
/// # Safety
/// `agent` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn advgo_agent_new_game(agent: *mut AdvgoAgent) -> AdvgoStatus {
    guard(|| {
        obj_mut(agent)?.agent.new_game();
        Ok(())
    })
}

/// Ask the agent for a move in the game position (the game is not
/// modified).
///
/// # Safety
/// Handles must be live; `vertex_out` writable.
#[no_mangle]
pub unsafe extern "C" fn advgo_agent_select_move(
    agent: *mut AdvgoAgent,
    game: *const AdvgoGame,
    vertex_out: *mut u32,
) -> AdvgoStatus {
    guard(|| {
        let a = obj_mut(agent)?;
        let state = &obj(game)?.state;
        if state.is_terminal() {
            return Err(Failure::new(AdvgoStatus::IllegalMove, "game is over"));
        }
        let d = a.agent.select_move(state, &mut a.rng).map_err(|e| Failure::new(AdvgoStatus::Agent, e))?;
        *out(vertex_out)? = d.mv.index(state.size()) as u32;
        Ok(())
    })
}
