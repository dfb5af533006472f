//! The convention ledger shipped with the crate and its fingerprint.

use sha2::{Digest, Sha256};

pub const CONVENTIONS: &str = include_str!("../../../CONVENTIONS.md");

/// Hex SHA-256 of [`CONVENTIONS`].
pub fn ledger_hash() -> String {
    hex::encode(Sha256::digest(CONVENTIONS.as_bytes()))
}
