//! Fixed Zobrist table.
//!
//! Keys are drawn from a SplitMix64 stream seeded with [`ZOBRIST_SEED`]:
//! the first `2 * 361` outputs are stone keys (Black block, then White block,
//! each indexed by `row * 19 + col`), the next 20 are per-size empty-board
//! keys indexed by board size. A grid hashes to its size key XOR the keys of
//! every stone on it.

use std::sync::LazyLock;

use super::types::{Color, MAX_CELLS, MAX_SIZE};
use super::Grid;

/// Seed of the key stream. The 19x19 empty-board hash is `0x3f1c_ae8d_a044_4004`.
pub const ZOBRIST_SEED: u64 = 0x7472_6f6d_7020_7461;

struct Table {
    stones: [[u64; MAX_CELLS]; 2],
    empty: [u64; MAX_SIZE + 1],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

static TABLE: LazyLock<Table> = LazyLock::new(|| {
    let mut state = ZOBRIST_SEED;
    let mut stones = [[0u64; MAX_CELLS]; 2];
    for block in stones.iter_mut() {
        for key in block.iter_mut() {
            *key = splitmix64(&mut state);
        }
    }
    let mut empty = [0u64; MAX_SIZE + 1];
    for key in empty.iter_mut() {
        *key = splitmix64(&mut state);
    }
    Table { stones, empty }
});

/// Key for a stone of `color` at (`row`, `col`).
#[inline]
pub fn stone_key(color: Color, row: usize, col: usize) -> u64 {
    TABLE.stones[color.index()][row * MAX_SIZE + col]
}

pub fn empty_board_hash(size: usize) -> u64 {
    TABLE.empty[size]
}

/// Full recomputation of a grid's hash.
pub fn zobrist_hash(grid: &Grid) -> u64 {
    let n = grid.size();
    let mut h = empty_board_hash(n);
    for idx in 0..n * n {
        if let Some(c) = grid.get_index(idx) {
            h ^= stone_key(c, idx / n, idx % n);
        }
    }
    h
}
