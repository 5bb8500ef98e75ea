//! RANDAO accumulation and the per-epoch mix ring buffer. Each epoch's mix
//! is the XOR of the hashed reveals contributed during that epoch on top of
//! the previous epoch's final mix; proposer selection for epoch E reads the
//! final mix of epoch E − 2.

use crate::digest::{hash_tagged, hash_tagged_parts, Digest};
use crate::validator::Validator;
use serde::{Deserialize, Serialize};

pub const SLOTS_PER_EPOCH: u64 = 32;

/// Ring length: covers the two-epoch selection lookback plus headroom.
pub const MIX_BUFFER_LEN: usize = 4;

pub fn epoch_of_slot(slot: u64) -> u64 {
    slot / SLOTS_PER_EPOCH
}

pub fn is_epoch_boundary(slot: u64) -> bool {
    (slot + 1) % SLOTS_PER_EPOCH == 0
}

/// Folds one reveal into a mix.
pub fn mix_randao(mix: &Digest, reveal: &[u8]) -> Digest {
    mix.xor(&hash_tagged("randao-reveal", reveal))
}

/// Deterministic reveal for a validator and epoch, standing in for a BLS
/// signature over the epoch number.
pub fn randao_reveal(v: &Validator, epoch: u64) -> [u8; 32] {
    *hash_tagged_parts("randao-secret", &[&v.secret_seed, &epoch.to_be_bytes()])
        .as_bytes()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandaoMixes {
    ring: [Digest; MIX_BUFFER_LEN],
}

impl RandaoMixes {
    /// Genesis fill: four seed-derived digests. Positions addressed as
    /// epochs −2 and −1 serve the first two epochs' proposer selection;
    /// position 0 is the starting mix epoch 0 accumulates onto.
    pub fn genesis(rng_seed: u64) -> RandaoMixes {
        let ring = std::array::from_fn(|i| {
            hash_tagged_parts(
                "genesis-mix",
                &[&rng_seed.to_be_bytes(), &(i as u64).to_be_bytes()],
            )
        });
        RandaoMixes { ring }
    }

    /// Mix accumulating during `epoch` (its final value once the epoch
    /// completes).
    pub fn current(&self, epoch: u64) -> &Digest {
        &self.ring[(epoch % MIX_BUFFER_LEN as u64) as usize]
    }

    pub fn accumulate(&mut self, epoch: u64, reveal: &[u8]) {
        let slot = (epoch % MIX_BUFFER_LEN as u64) as usize;
        self.ring[slot] = mix_randao(&self.ring[slot], reveal);
    }

    /// Mix proposer selection for `epoch` draws from: the final mix of
    /// epoch − 2, with genesis digests covering the first two epochs.
    pub fn selection_mix(&self, epoch: u64) -> Digest {
        self.ring[((epoch + MIX_BUFFER_LEN as u64 - 2) % MIX_BUFFER_LEN as u64) as usize]
    }

    /// Epoch rollover: the finished epoch's mix is copied forward as the
    /// next epoch's starting point.
    pub fn roll_forward(&mut self, completed_epoch: u64) {
        let from = (completed_epoch % MIX_BUFFER_LEN as u64) as usize;
        let to = ((completed_epoch + 1) % MIX_BUFFER_LEN as u64) as usize;
        self.ring[to] = self.ring[from];
    }
}
