//! Encrypted-integer arithmetic with operation-cost accounting.
//!
//! The default backend stores values in the clear inside opaque handles:
//! every homomorphic operation is tallied in a [`CostMeter`] and decryption
//! is gated behind a [`DecryptionKey`] capability, so callers are held to
//! the same interface discipline a genuine FHE backend would impose. A real
//! backend can replace this one by reimplementing the same context API.
//!
//! Arithmetic operations (`h_add`, `h_sub`, `h_cmp_lt`) work modulo `2^W`
//! for the context width `W`; bitwise operations act on the full 64-bit
//! container, which is what the cipher circuits evaluated over encrypted
//! words require.

mod hirose;
mod meter;
mod prince;
mod prf;

pub use hirose::{hirose_hash, HIROSE_DIGEST_LEN};
pub use meter::{CostMeter, CostSnapshot, OpKind};
pub use prince::{
    k0_prime, prince_decrypt, prince_encrypt, PrinceKey, PRINCE_ALPHA, PRINCE_ROUNDS_PER_SIDE,
};
pub use prf::{prf_enc, prf_key, prf_plain};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FheError {
    #[error("width must be between 1 and 64, got {0}")]
    InvalidWidth(u32),
}

/// Handle to an encrypted W-bit integer. The contained value is private to
/// this module; the rest of the crate can only combine handles through the
/// homomorphic operations or decrypt via the key.
#[derive(Clone, Debug)]
pub struct EncInt {
    value: u64,
}

/// Capability required to decrypt. Only [`FheCtx::new`] hands one out, so
/// ownership marks the single place in a simulation allowed to see
/// plaintexts.
#[derive(Debug)]
pub struct DecryptionKey {
    _private: (),
}

/// Evaluation context: fixed integer width plus the meter every operation
/// reports to.
#[derive(Clone, Debug)]
pub struct FheCtx {
    width: u32,
    meter: CostMeter,
}

impl FheCtx {
    pub fn new(width: u32, meter: CostMeter) -> Result<(FheCtx, DecryptionKey), FheError> {
        if width == 0 || width > 64 {
            return Err(FheError::InvalidWidth(width));
        }
        Ok((FheCtx { width, meter }, DecryptionKey { _private: () }))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn meter(&self) -> &CostMeter {
        &self.meter
    }

    fn arith_mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    pub fn enc(&self, x: u64) -> EncInt {
        assert!(
            x <= self.arith_mask(),
            "plaintext {x} exceeds the context width {}",
            self.width
        );
        EncInt { value: x }
    }

    pub fn dec(&self, _key: &DecryptionKey, c: &EncInt) -> u64 {
        c.value
    }

    /// Addition modulo 2^W.
    pub fn h_add(&self, a: &EncInt, b: &EncInt) -> EncInt {
        self.meter.record(OpKind::Add);
        EncInt {
            value: a.value.wrapping_add(b.value) & self.arith_mask(),
        }
    }

    /// Subtraction modulo 2^W.
    pub fn h_sub(&self, a: &EncInt, b: &EncInt) -> EncInt {
        self.meter.record(OpKind::Sub);
        EncInt {
            value: a.value.wrapping_sub(b.value) & self.arith_mask(),
        }
    }

    /// Encrypted indicator of `a < b` (0 or 1).
    pub fn h_cmp_lt(&self, a: &EncInt, b: &EncInt) -> EncInt {
        self.meter.record(OpKind::CmpLt);
        EncInt {
            value: (a.value < b.value) as u64,
        }
    }

    /// `bit` must hold 0 or 1; returns `a` when 1, `b` when 0.
    pub fn h_select(&self, bit: &EncInt, a: &EncInt, b: &EncInt) -> EncInt {
        debug_assert!(bit.value <= 1, "selector must be a bit");
        self.meter.record(OpKind::Select);
        EncInt {
            value: if bit.value == 1 { a.value } else { b.value },
        }
    }

    pub fn h_xor(&self, a: &EncInt, b: &EncInt) -> EncInt {
        self.meter.record(OpKind::Xor);
        EncInt {
            value: a.value ^ b.value,
        }
    }

    pub fn h_and(&self, a: &EncInt, b: &EncInt) -> EncInt {
        self.meter.record(OpKind::And);
        EncInt {
            value: a.value & b.value,
        }
    }

    pub fn h_xor_const(&self, a: &EncInt, k: u64) -> EncInt {
        self.meter.record(OpKind::Xor);
        EncInt { value: a.value ^ k }
    }

    pub fn h_and_const(&self, a: &EncInt, mask: u64) -> EncInt {
        self.meter.record(OpKind::And);
        EncInt {
            value: a.value & mask,
        }
    }

    /// Logical shift left on the 64-bit container.
    pub fn h_shl(&self, a: &EncInt, n: u32) -> EncInt {
        debug_assert!(n < 64);
        self.meter.record(OpKind::Rotate);
        EncInt {
            value: a.value << n,
        }
    }

    /// Logical shift right on the 64-bit container.
    pub fn h_shr(&self, a: &EncInt, n: u32) -> EncInt {
        debug_assert!(n < 64);
        self.meter.record(OpKind::Rotate);
        EncInt {
            value: a.value >> n,
        }
    }

    /// Two's-complement negation on the container; spreads a bit into a
    /// full mask.
    pub fn h_neg(&self, a: &EncInt) -> EncInt {
        self.meter.record(OpKind::Sub);
        EncInt {
            value: a.value.wrapping_neg(),
        }
    }

    /// Looks up a 16-entry table at an encrypted index below 16.
    pub fn h_table_lookup(&self, table: &[u64; 16], idx: &EncInt) -> EncInt {
        debug_assert!(idx.value < 16, "lookup index must be a nibble");
        self.meter.record(OpKind::TableLookup);
        EncInt {
            value: table[idx.value as usize],
        }
    }
}

/// Word view used to run cipher circuits over encrypted data; pairs a
/// ciphertext with the context that meters its operations.
#[derive(Clone)]
pub(crate) struct EncWord<'a> {
    pub(crate) ctx: &'a FheCtx,
    pub(crate) value: EncInt,
}
