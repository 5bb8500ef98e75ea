//! Keyed pseudorandom function used for leadership vouchers: the seed is
//! stretched into a cipher key by the hash, the ticket goes through the
//! cipher as the block. Under a fixed seed the map is a permutation, so
//! distinct tickets can never collide.

use super::hirose::hirose_hash;
use super::prince::{prince_encrypt, prince_encrypt_word, PrinceKey, PRINCE_ROUNDS_PER_SIDE};
use super::{EncInt, EncWord, FheCtx};

pub fn prf_key(seed: u64) -> PrinceKey {
    PrinceKey::from_bytes(&hirose_hash(&seed.to_be_bytes()))
}

pub fn prf_plain(ticket: u64, seed: u64) -> u64 {
    prince_encrypt(PRINCE_ROUNDS_PER_SIDE, prf_key(seed), ticket)
}

/// Same circuit over an encrypted ticket; the seed (and thus the key
/// schedule) is public, only the block stays encrypted.
pub fn prf_enc(ctx: &FheCtx, ticket: &EncInt, seed: u64) -> EncInt {
    assert_eq!(ctx.width(), 64, "voucher circuit runs on 64-bit words");
    let word = EncWord {
        ctx,
        value: ticket.clone(),
    };
    prince_encrypt_word(PRINCE_ROUNDS_PER_SIDE, prf_key(seed), &word).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fhe::CostMeter;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    #[test]
    fn encrypted_variant_agrees_with_plaintext_variant() {
        let meter = CostMeter::new();
        let (ctx, key) = FheCtx::new(64, meter).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(47);
        for _ in 0..100 {
            let ticket: u64 = rng.gen();
            let seed: u64 = rng.gen();
            let out = prf_enc(&ctx, &ctx.enc(ticket), seed);
            assert_eq!(ctx.dec(&key, &out), prf_plain(ticket, seed));
        }
    }

    #[test]
    fn distinct_tickets_never_collide_under_one_seed() {
        let seed = 0x5eed_0001;
        let mut outputs = HashSet::new();
        for ticket in 0..10_000u64 {
            assert!(outputs.insert(prf_plain(ticket, seed)));
        }
    }

    #[test]
    fn seed_changes_the_key_and_the_outputs() {
        let mut rng = ChaCha20Rng::seed_from_u64(48);
        for _ in 0..100 {
            let ticket: u64 = rng.gen();
            let s1: u64 = rng.gen();
            let s2: u64 = rng.gen();
            if s1 == s2 {
                continue;
            }
            assert_ne!(prf_key(s1), prf_key(s2));
            assert_ne!(prf_plain(ticket, s1), prf_plain(ticket, s2));
        }
    }

    #[test]
    fn pinned_regression_vectors() {
        assert_eq!(prf_plain(0, 0), 0x539f832760b4b2d6);
        assert_eq!(prf_plain(0x0123456789abcdef, 0xfeedface), 0x95526c35a9047841);
        let k = prf_key(0);
        assert_eq!(k.k1, 0xe3d02b459ca9f556);
        assert_eq!(k.k0, 0x418fbe2e97498eec);
    }

    #[test]
    fn operation_count_is_input_independent() {
        let meter = CostMeter::new();
        let (ctx, _key) = FheCtx::new(64, meter.clone()).unwrap();
        let before = meter.snapshot();
        prf_enc(&ctx, &ctx.enc(12345), 7);
        let mid = meter.snapshot();
        prf_enc(&ctx, &ctx.enc(u64::MAX), u64::MAX);
        let after = meter.snapshot();
        let first = mid.delta_since(&before);
        let second = after.delta_since(&mid);
        assert_eq!(first, second);
        assert_eq!(first.cipher_call, 1);
        assert!(first.table_lookup > 0);
        assert!(first.xor > 0);
    }
}
