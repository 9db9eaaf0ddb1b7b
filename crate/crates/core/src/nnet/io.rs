//! Weights file:
//!
//! ```text
//! magic     8 bytes  "ADVGONET"
//! version   u32      1
//! blocks    u32
//! channels  u32
//! board     u32
//! count     u64      number of parameters
//! params    count × f32, little-endian, in layout order
//! crc32     u32      over every preceding byte
//! ```
//!
//! Layout order: stem conv weights and bias; per block conv1 weights, bias,
//! conv2 weights, bias; policy head (point weights, bias, pass weights, pass
//! bias); opponent head (same); value head (hidden weights, bias, output
//! weights, bias); ownership head (weights, bias). Conv weights are
//! `out × in × 3 × 3` row-major.

use std::fs;
use std::path::Path;

use super::network::{Arch, Network};
use super::NetError;

pub const MAGIC: &[u8; 8] = b"ADVGONET";
pub const FORMAT_VERSION: u32 = 1;

pub fn to_bytes(net: &Network) -> Vec<u8> {
    let arch = net.arch();
    let mut out = Vec::with_capacity(32 + 4 * net.param_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for x in [arch.blocks, arch.channels, arch.board_size] {
        out.extend_from_slice(&(x as u32).to_le_bytes());
    }
    out.extend_from_slice(&(net.param_count() as u64).to_le_bytes());
    for &p in net.params() {
        out.extend_from_slice(&(p as f32).to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<Network, NetError> {
    let header = 8 + 4 * 4 + 8;
    if bytes.len() < header + 4 {
        return Err(NetError::Truncated);
    }
    if &bytes[..8] != MAGIC {
        return Err(NetError::BadMagic);
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let version = u32_at(8);
    if version != FORMAT_VERSION {
        return Err(NetError::Version { found: version, expected: FORMAT_VERSION });
    }
    let arch = Arch::new(u32_at(12) as usize, u32_at(16) as usize, u32_at(20) as usize);
    let count = u64::from_le_bytes(bytes[24..32].try_into().expect("8 bytes")) as usize;
    let end = count
        .checked_mul(4)
        .and_then(|b| b.checked_add(header))
        .ok_or(NetError::Truncated)?;
    if bytes.len() < end + 4 {
        return Err(NetError::Truncated);
    }
    let stored = u32_at(end);
    if crc32fast::hash(&bytes[..end]) != stored {
        return Err(NetError::Checksum);
    }
    let params = bytes[header..end]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    Network::from_params(arch, params)
}

pub fn save(net: &Network, path: impl AsRef<Path>) -> Result<(), NetError> {
    fs::write(path, to_bytes(net))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Network, NetError> {
    from_bytes(&fs::read(path)?)
}
