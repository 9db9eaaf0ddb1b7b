use std::ffi::{CStr, CString};
use std::ptr;

use advgo_ffi::*;

fn last_error() -> String {
    let p = advgo_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_game(size: u32) -> *mut AdvgoGame {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { advgo_game_new(size, 7.5, &mut g) }, AdvgoStatus::Ok);
    g
}

#[test]
fn game_lifecycle_and_scoring() {
    unsafe {
        let g = new_game(5);
        assert_eq!(advgo_game_size(g), 5);
        let mut color = AdvgoColor::Empty;
        assert_eq!(advgo_game_to_move(g, &mut color), AdvgoStatus::Ok);
        assert_eq!(color, AdvgoColor::Black);
        assert_eq!(advgo_game_play(g, 12), AdvgoStatus::Ok);
        // Occupied point.
        let mut legal = true;
        assert_eq!(advgo_game_is_legal(g, 12, &mut legal), AdvgoStatus::Ok);
        assert!(!legal);
        assert_eq!(advgo_game_play(g, 12), AdvgoStatus::IllegalMove);
        assert!(last_error().contains("occupied"));
        let mut board = [AdvgoColor::Empty; 25];
        assert_eq!(advgo_game_board(g, board.as_mut_ptr(), 25), AdvgoStatus::Ok);
        assert_eq!(board[12], AdvgoColor::Black);
        assert_eq!(advgo_game_board(g, board.as_mut_ptr(), 24), AdvgoStatus::BufferTooSmall);
        // Two passes end the game; the lone stone owns the board.
        assert_eq!(advgo_game_play(g, 25), AdvgoStatus::Ok);
        assert_eq!(advgo_game_play(g, 25), AdvgoStatus::Ok);
        let mut terminal = false;
        assert_eq!(advgo_game_is_terminal(g, &mut terminal), AdvgoStatus::Ok);
        assert!(terminal);
        let mut score = AdvgoScore::default();
        assert_eq!(advgo_game_score(g, &mut score), AdvgoStatus::Ok);
        assert_eq!(score, AdvgoScore { black_points: 25.0, white_points: 7.5, winner: AdvgoColor::Black });
        assert_eq!(advgo_game_play(g, 0), AdvgoStatus::IllegalMove);
        assert_eq!(advgo_game_play(g, 26), AdvgoStatus::InvalidArgument);
        advgo_game_free(g);
    }
}

#[test]
fn sgf_round_trip() {
    unsafe {
        let g = new_game(9);
        for v in [40, 41, 30, 81] {
            assert_eq!(advgo_game_play(g, v), AdvgoStatus::Ok);
        }
        let mut sgf = ptr::null_mut();
        assert_eq!(advgo_game_to_sgf(g, &mut sgf), AdvgoStatus::Ok);
        let text = CStr::from_ptr(sgf).to_owned();
        advgo_string_free(sgf);
        let mut h = ptr::null_mut();
        assert_eq!(advgo_game_from_sgf(text.as_ptr(), &mut h), AdvgoStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(advgo_game_to_sgf(h, &mut again), AdvgoStatus::Ok);
        assert_eq!(CStr::from_ptr(again), text.as_c_str());
        advgo_string_free(again);
        let bad = CString::new("(;SZ[9];B[zz])").unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(advgo_game_from_sgf(bad.as_ptr(), &mut none), AdvgoStatus::Parse);
        assert!(none.is_null());
        advgo_game_free(g);
        advgo_game_free(h);
    }
}

#[test]
fn pass_alive_masks() {
    // Black wall on column 1 with two eyes at the left edge.
    let sgf = CString::new("(;FF[4]GM[1]SZ[5]KM[7.5]AB[ba][bb][bc][bd][be][ab][ad])").unwrap();
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(advgo_game_from_sgf(sgf.as_ptr(), &mut g), AdvgoStatus::Ok);
        let mut stones = [0u8; 25];
        assert_eq!(advgo_pass_alive_stones(g, AdvgoColor::Black, stones.as_mut_ptr(), 25), AdvgoStatus::Ok);
        assert_eq!(stones.iter().filter(|&&s| s == 1).count(), 7);
        let mut territory = [0u8; 25];
        assert_eq!(advgo_pass_alive_territory(g, AdvgoColor::Black, territory.as_mut_ptr(), 25), AdvgoStatus::Ok);
        // Only the three left-edge eyes: most of the large right-hand
        // region does not touch the wall.
        assert_eq!(territory.iter().filter(|&&s| s == 1).count(), 3);
        assert_eq!(
            advgo_pass_alive_stones(g, AdvgoColor::Empty, stones.as_mut_ptr(), 25),
            AdvgoStatus::InvalidArgument
        );
        advgo_game_free(g);
    }
}

#[test]
fn agents_choose_legal_moves() {
    unsafe {
        let g = new_game(7);
        for d in ["random", "edge", "spiral", "mirror,hardened"] {
            let desc = CString::new(d).unwrap();
            let mut a = ptr::null_mut();
            assert_eq!(advgo_agent_new(desc.as_ptr(), 3, &mut a), AdvgoStatus::Ok, "{d}");
            let mut v = u32::MAX;
            assert_eq!(advgo_agent_select_move(a, g, &mut v), AdvgoStatus::Ok);
            let mut legal = false;
            assert_eq!(advgo_game_is_legal(g, v, &mut legal), AdvgoStatus::Ok);
            assert!(legal, "{d} chose {v}");
            advgo_agent_free(a);
        }
        let bad = CString::new("bogus").unwrap();
        let mut a = ptr::null_mut();
        assert_eq!(advgo_agent_new(bad.as_ptr(), 0, &mut a), AdvgoStatus::Parse);
        assert!(last_error().contains("bogus"));
        advgo_game_free(g);
    }
}

#[test]
fn network_evaluation_through_a_checkpoint_file() {
    use rand::SeedableRng;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.bin");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let net = advgo::nnet::Network::new(advgo::nnet::Arch::new(1, 4, 5), &mut rng).unwrap();
    advgo::nnet::save(&net, &path).unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut n = ptr::null_mut();
        assert_eq!(advgo_network_load(cpath.as_ptr(), &mut n), AdvgoStatus::Ok);
        let g = new_game(5);
        let mut value = f64::NAN;
        let mut policy = [0.0f64; 26];
        assert_eq!(advgo_network_evaluate(n, g, &mut value, policy.as_mut_ptr(), 26), AdvgoStatus::Ok);
        assert!((-1.0..=1.0).contains(&value));
        assert!((policy.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let other = new_game(7);
        let mut big = [0.0f64; 50];
        assert_eq!(
            advgo_network_evaluate(n, other, &mut value, big.as_mut_ptr(), 50),
            AdvgoStatus::InvalidArgument
        );
        advgo_game_free(g);
        advgo_game_free(other);
        advgo_network_free(n);
        let missing = CString::new(dir.path().join("nope.bin").to_str().unwrap()).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(advgo_network_load(missing.as_ptr(), &mut m), AdvgoStatus::Io);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(advgo_game_new(9, 7.5, ptr::null_mut()), AdvgoStatus::NullPointer);
        let mut c = AdvgoColor::Empty;
        assert_eq!(advgo_game_to_move(ptr::null(), &mut c), AdvgoStatus::NullPointer);
        assert_eq!(advgo_game_play(ptr::null_mut(), 0), AdvgoStatus::NullPointer);
        assert_eq!(advgo_game_size(ptr::null()), 0);
        let mut g = ptr::null_mut();
        assert_eq!(advgo_game_new(1, 7.5, &mut g), AdvgoStatus::InvalidArgument);
        advgo_game_free(ptr::null_mut());
        advgo_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/advgo.h");
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.trim().strip_prefix("pub unsafe extern \"C\" fn ").or(l.trim().strip_prefix("pub extern \"C\" fn ")))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 18);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["AdvgoStatus", "AdvgoColor", "AdvgoScore", "AdvgoGame", "AdvgoNetwork", "AdvgoAgent"] {
        assert!(header.contains(ty), "{ty}");
    }
}
