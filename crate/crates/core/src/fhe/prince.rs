//! 64-bit block cipher with a 128-bit key, built as an FX construction
//! around a reflective 12-round core. The round function is expressed over
//! a generic word so the same circuit runs on plaintext words and on
//! encrypted words with cost accounting; only data words are generic, keys
//! and round constants stay public.

use super::{EncWord, OpKind};

/// Number of rounds on each side of the middle reflector in the full
/// cipher. Reduced-round variants keep the reflective structure (and with
/// it the decryption identity) for any value from 0 to 5.
pub const PRINCE_ROUNDS_PER_SIDE: u32 = 5;

/// Reflection constant; every round-constant pair satisfies
/// `RC[i] ^ RC[11 - i] == PRINCE_ALPHA`.
pub const PRINCE_ALPHA: u64 = 0xc0ac29b7c97c50dd;

pub const PRINCE_ROUND_CONSTANTS: [u64; 12] = [
    0x0000000000000000,
    0x13198a2e03707344,
    0xa4093822299f31d0,
    0x082efa98ec4e6c89,
    0x452821e638d01377,
    0xbe5466cf34e90c6c,
    0x7ef84f78fd955cb1,
    0x85840851f1ac43aa,
    0xc882d32f25323c54,
    0x64a51195e0e3610d,
    0xd3b5a399ca0c2399,
    0xc0ac29b7c97c50dd,
];

const SBOX: [u64; 16] = [
    0xb, 0xf, 0x3, 0x2, 0xa, 0xc, 0x9, 0x1, 0x6, 0x7, 0x8, 0x0, 0xe, 0x5, 0xd, 0x4,
];
const SBOX_INV: [u64; 16] = [
    0xb, 0x7, 0x3, 0x2, 0xf, 0xd, 0x8, 0x9, 0xa, 0x6, 0x4, 0x0, 0x5, 0xe, 0xc, 0x1,
];

// nibble at position i (counted from the most significant nibble) moves to
// position SHIFT_ROWS[i]
const SHIFT_ROWS: [usize; 16] = [0, 13, 10, 7, 4, 1, 14, 11, 8, 5, 2, 15, 12, 9, 6, 3];
const SHIFT_ROWS_INV: [usize; 16] = [0, 5, 10, 15, 4, 9, 14, 3, 8, 13, 2, 7, 12, 1, 6, 11];

// 16x16 GF(2) matrix chunks of the involutive diffusion layer
const M0: [u64; 16] = [
    0x0111, 0x2220, 0x4404, 0x8088, 0x1011, 0x0222, 0x4440, 0x8808, 0x1101, 0x2022, 0x0444,
    0x8880, 0x1110, 0x2202, 0x4044, 0x0888,
];
const M1: [u64; 16] = [
    0x1110, 0x2202, 0x4044, 0x0888, 0x0111, 0x2220, 0x4404, 0x8088, 0x1011, 0x0222, 0x4440,
    0x8808, 0x1101, 0x2022, 0x0444, 0x8880,
];

// row masks of the full 64x64 diffusion matrix: bit i of the input
// contributes ROWS[i] to the output (chunks 0..3 use M0, M1, M1, M0)
const M_PRIME_ROWS: [u64; 64] = build_m_prime_rows();

const fn build_m_prime_rows() -> [u64; 64] {
    let mut rows = [0u64; 64];
    let mut i = 0;
    while i < 64 {
        let chunk = i / 16;
        let entry = match chunk {
            0 | 3 => M0[i % 16],
            _ => M1[i % 16],
        };
        rows[i] = entry << (chunk * 16);
        i += 1;
    }
    rows
}

/// 128-bit cipher key split into the whitening half `k0` and the core half
/// `k1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrinceKey {
    pub k0: u64,
    pub k1: u64,
}

impl PrinceKey {
    /// Key layout used throughout: the first eight bytes feed the core half,
    /// the last eight the whitening half.
    pub fn from_bytes(bytes: &[u8; 16]) -> PrinceKey {
        PrinceKey {
            k1: u64::from_be_bytes(bytes[..8].try_into().unwrap()),
            k0: u64::from_be_bytes(bytes[8..].try_into().unwrap()),
        }
    }
}

/// Output-whitening word derived from the input-whitening word.
pub fn k0_prime(k0: u64) -> u64 {
    k0.rotate_right(1) ^ (k0 >> 63)
}

/// Data word the cipher circuit runs over: plain `u64` or an encrypted word
/// whose operations are metered.
pub(crate) trait CipherWord: Clone {
    fn xor(&self, other: &Self) -> Self;
    fn xor_const(&self, k: u64) -> Self;
    fn and_const(&self, mask: u64) -> Self;
    fn shl(&self, n: u32) -> Self;
    fn shr(&self, n: u32) -> Self;
    /// Two's-complement negation; spreads a 0/1 word into a 0/all-ones mask.
    fn neg(&self) -> Self;
    /// 16-entry table lookup; the word must hold a value below 16.
    fn lookup16(&self, table: &[u64; 16]) -> Self;
}

impl CipherWord for u64 {
    fn xor(&self, other: &u64) -> u64 {
        self ^ other
    }
    fn xor_const(&self, k: u64) -> u64 {
        self ^ k
    }
    fn and_const(&self, mask: u64) -> u64 {
        self & mask
    }
    fn shl(&self, n: u32) -> u64 {
        self << n
    }
    fn shr(&self, n: u32) -> u64 {
        self >> n
    }
    fn neg(&self) -> u64 {
        self.wrapping_neg()
    }
    fn lookup16(&self, table: &[u64; 16]) -> u64 {
        debug_assert!(*self < 16);
        table[*self as usize]
    }
}

impl CipherWord for EncWord<'_> {
    fn xor(&self, other: &Self) -> Self {
        EncWord {
            ctx: self.ctx,
            value: self.ctx.h_xor(&self.value, &other.value),
        }
    }
    fn xor_const(&self, k: u64) -> Self {
        EncWord {
            ctx: self.ctx,
            value: self.ctx.h_xor_const(&self.value, k),
        }
    }
    fn and_const(&self, mask: u64) -> Self {
        EncWord {
            ctx: self.ctx,
            value: self.ctx.h_and_const(&self.value, mask),
        }
    }
    fn shl(&self, n: u32) -> Self {
        EncWord {
            ctx: self.ctx,
            value: self.ctx.h_shl(&self.value, n),
        }
    }
    fn shr(&self, n: u32) -> Self {
        EncWord {
            ctx: self.ctx,
            value: self.ctx.h_shr(&self.value, n),
        }
    }
    fn neg(&self) -> Self {
        EncWord {
            ctx: self.ctx,
            value: self.ctx.h_neg(&self.value),
        }
    }
    fn lookup16(&self, table: &[u64; 16]) -> Self {
        EncWord {
            ctx: self.ctx,
            value: self.ctx.h_table_lookup(table, &self.value),
        }
    }
}

fn sbox_layer<W: CipherWord>(x: &W, table: &[u64; 16]) -> W {
    let mut acc: Option<W> = None;
    for j in 0..16 {
        let nibble = x.shr(4 * j).and_const(0xf);
        let substituted = nibble.lookup16(table).shl(4 * j);
        acc = Some(match acc {
            None => substituted,
            Some(a) => a.xor(&substituted),
        });
    }
    acc.expect("sixteen nibbles")
}

// branchless matrix multiply so the same circuit shape runs over encrypted
// words: each input bit is spread into a mask that gates its row
fn m_prime<W: CipherWord>(x: &W) -> W {
    let mut acc: Option<W> = None;
    for (i, row) in M_PRIME_ROWS.iter().enumerate() {
        let term = x.shr(i as u32).and_const(1).neg().and_const(*row);
        acc = Some(match acc {
            None => term,
            Some(a) => a.xor(&term),
        });
    }
    acc.expect("sixty-four rows")
}

fn shift_rows<W: CipherWord>(x: &W, table: &[usize; 16]) -> W {
    let mut acc: Option<W> = None;
    for (i, &dst) in table.iter().enumerate() {
        let moved = x
            .shr(((15 - i) * 4) as u32)
            .and_const(0xf)
            .shl(((15 - dst) * 4) as u32);
        acc = Some(match acc {
            None => moved,
            Some(a) => a.xor(&moved),
        });
    }
    acc.expect("sixteen nibbles")
}

/// FX-construction core with explicit whitening words. Inverting it swaps
/// the whitening words and offsets the core key by [`PRINCE_ALPHA`]; both
/// public entry points below are defined through that identity.
fn crypt<W: CipherWord>(
    rounds_per_side: u32,
    whiten_in: u64,
    whiten_out: u64,
    core_key: u64,
    block: &W,
) -> W {
    assert!(
        rounds_per_side <= PRINCE_ROUNDS_PER_SIDE,
        "at most {PRINCE_ROUNDS_PER_SIDE} rounds per side"
    );
    let rc = &PRINCE_ROUND_CONSTANTS;
    let mut s = block.xor_const(whiten_in ^ core_key ^ rc[0]);
    for i in 1..=rounds_per_side as usize {
        s = sbox_layer(&s, &SBOX);
        s = m_prime(&s);
        s = shift_rows(&s, &SHIFT_ROWS);
        s = s.xor_const(rc[i] ^ core_key);
    }
    s = sbox_layer(&s, &SBOX);
    s = m_prime(&s);
    s = sbox_layer(&s, &SBOX_INV);
    for i in (11 - rounds_per_side as usize)..=10 {
        s = s.xor_const(rc[i] ^ core_key);
        s = shift_rows(&s, &SHIFT_ROWS_INV);
        s = m_prime(&s);
        s = sbox_layer(&s, &SBOX_INV);
    }
    s.xor_const(rc[11] ^ core_key ^ whiten_out)
}

pub fn prince_encrypt(rounds_per_side: u32, key: PrinceKey, block: u64) -> u64 {
    crypt(rounds_per_side, key.k0, k0_prime(key.k0), key.k1, &block)
}

pub fn prince_decrypt(rounds_per_side: u32, key: PrinceKey, block: u64) -> u64 {
    crypt(
        rounds_per_side,
        k0_prime(key.k0),
        key.k0,
        key.k1 ^ PRINCE_ALPHA,
        &block,
    )
}

/// Runs the encryption circuit over an encrypted word; the key and round
/// constants stay public.
pub(crate) fn prince_encrypt_word<'a>(
    rounds_per_side: u32,
    key: PrinceKey,
    block: &EncWord<'a>,
) -> EncWord<'a> {
    block.ctx.meter().record(OpKind::CipherCall);
    crypt(rounds_per_side, key.k0, k0_prime(key.k0), key.k1, block)
}
