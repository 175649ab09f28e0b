//! Binary cloud files: the magic `TCLOUD01`, a little-endian `u64` point
//! count, then `x, y` pairs as little-endian `f64`.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};

use torus_spread::geom::Vec2R;

pub const MAGIC: &[u8; 8] = b"TCLOUD01";
pub const EXTENSION: &str = "tcloud";

pub fn encode(points: &[Vec2R]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * points.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(points.len() as u64).to_le_bytes());
    for p in points {
        out.extend_from_slice(&p.x.to_le_bytes());
        out.extend_from_slice(&p.y.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> io::Result<Vec<Vec2R>> {
    let invalid = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(invalid("not a cloud file (bad magic)"));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let body = &bytes[16..];
    if (body.len() as u64) != count.saturating_mul(16) {
        return Err(invalid("cloud file length does not match its point count"));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    Ok(body
        .chunks_exact(16)
        .map(|c| Vec2R::new(f(&c[..8]), f(&c[8..])))
        .collect())
}

/// Lowercase hex SHA-256 of the encoded bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        write!(s, "{b:02x}").unwrap();
    }
    s
}

pub fn read(path: &Path) -> io::Result<Vec<Vec2R>> {
    decode(&std::fs::read(path)?)
}
