//! Double-block-length hash over the 64-bit cipher: a 128-bit chaining
//! state is updated by two related cipher calls per 8-byte message block,
//! giving a 128-bit digest from a 64-bit primitive. Used to stretch seeds
//! into cipher keys without pulling in a second primitive.

use super::prince::{prince_encrypt, PrinceKey, PRINCE_ROUNDS_PER_SIDE};

pub const HIROSE_DIGEST_LEN: usize = 16;

const IV_G: u64 = 0x6a09e667f3bcc908;
const IV_H: u64 = 0xbb67ae8584caa73b;
const BRANCH_CONSTANT: u64 = 1;

fn compress(g: u64, h: u64, block: u64) -> (u64, u64) {
    let key = PrinceKey { k1: h, k0: block };
    let g_next = prince_encrypt(PRINCE_ROUNDS_PER_SIDE, key, g) ^ g;
    let forked = g ^ BRANCH_CONSTANT;
    let h_next = prince_encrypt(PRINCE_ROUNDS_PER_SIDE, key, forked) ^ forked;
    (g_next, h_next)
}

/// 16-byte digest of an arbitrary message. Padding appends a 0x80 marker,
/// zero-fills to an 8-byte boundary, then appends the message bit length as
/// a final big-endian block.
pub fn hirose_hash(message: &[u8]) -> [u8; HIROSE_DIGEST_LEN] {
    let mut padded = message.to_vec();
    padded.push(0x80);
    while padded.len() % 8 != 0 {
        padded.push(0);
    }
    padded.extend_from_slice(&((message.len() as u64) * 8).to_be_bytes());

    let (mut g, mut h) = (IV_G, IV_H);
    for block in padded.chunks_exact(8) {
        let m = u64::from_be_bytes(block.try_into().unwrap());
        (g, h) = compress(g, h, m);
    }

    let mut digest = [0u8; HIROSE_DIGEST_LEN];
    digest[..8].copy_from_slice(&g.to_be_bytes());
    digest[8..].copy_from_slice(&h.to_be_bytes());
    digest
}
