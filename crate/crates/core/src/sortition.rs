//! Stake-weighted leader election over encrypted tickets. Stake prefix
//! sums partition [0, total) into per-validator intervals; a public random
//! draw lands in exactly one interval, an encrypted comparison circuit
//! picks that validator's encrypted ticket without revealing the index,
//! and a PRF voucher derived from the selected ticket is decrypted and
//! published. Only the winner can locally recompute the voucher from their
//! plaintext ticket, which is the proposer claim.
//!
//! Two run modes: `full` evaluates the whole circuit and voucher pipeline;
//! `simplified` resolves the winner from the plaintext oracle and skips
//! voucher generation and verification.

use crate::digest::{hash_tagged_parts, Digest};
use crate::fhe::{prf_enc, prf_plain, CostMeter, DecryptionKey, EncInt, FheCtx, FheError, OpKind};
use crate::validator::Registry;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SortitionError {
    #[error(transparent)]
    Width(#[from] FheError),
    #[error("full mode evaluates the 64-bit voucher circuit; width {0} is not supported")]
    FullModeNeedsWidth64(u32),
    #[error("validator {0} has zero stake")]
    ZeroBalance(usize),
    #[error("total stake overflows a 64-bit prefix sum")]
    StakeOverflow,
    #[error("total stake {total} does not fit in {width}-bit ciphertexts")]
    StakeOverflowsWidth { total: u64, width: u32 },
    #[error("validators {first} and {second} drew the same ticket")]
    TicketCollision { first: usize, second: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortitionMode {
    Simplified,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SortitionParams {
    pub mode: SortitionMode,
    #[serde(default = "default_ticket_width")]
    pub width: u32,
}

fn default_ticket_width() -> u32 {
    64
}

impl Default for SortitionParams {
    fn default() -> Self {
        SortitionParams {
            mode: SortitionMode::Simplified,
            width: default_ticket_width(),
        }
    }
}

impl SortitionParams {
    /// The structural checks registration would fail on, available before
    /// any state exists.
    pub fn validate(&self) -> Result<(), SortitionError> {
        if self.width == 0 || self.width > 64 {
            return Err(FheError::InvalidWidth(self.width).into());
        }
        if self.mode == SortitionMode::Full && self.width != 64 {
            return Err(SortitionError::FullModeNeedsWidth64(self.width));
        }
        Ok(())
    }
}

/// prefix[0] = 0, prefix[i+1] = prefix[i] + balance[i]; validator i owns
/// the draw interval [prefix[i], prefix[i+1]).
pub fn build_intervals(balances: &[u64]) -> Result<Vec<u64>, SortitionError> {
    let mut prefix = Vec::with_capacity(balances.len() + 1);
    let mut acc = 0u64;
    prefix.push(0);
    for (i, &b) in balances.iter().enumerate() {
        if b == 0 {
            return Err(SortitionError::ZeroBalance(i));
        }
        acc = acc.checked_add(b).ok_or(SortitionError::StakeOverflow)?;
        prefix.push(acc);
    }
    Ok(prefix)
}

/// Result of one slot's election. `winner` is simulation ground truth;
/// `voucher` is the published word (full mode only).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotElection {
    pub slot: u64,
    pub winner: usize,
    pub voucher: Option<u64>,
}

/// A validator's slot claim: their locally recomputed voucher. Valid iff
/// it equals the published one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoucherClaim {
    pub claimant: usize,
    pub voucher_recomputed: u64,
}

#[derive(Debug)]
pub struct SortitionState {
    pub params: SortitionParams,
    ctx: FheCtx,
    key: DecryptionKey,
    /// Plaintext tickets, indexed by validator. Each entry stands for that
    /// validator's private knowledge; never exposed through views.
    tickets_plain: Vec<u64>,
    tickets_enc: Vec<EncInt>,
    prefix: Vec<u64>,
    prefix_enc: Vec<EncInt>,
    total: u64,
}

impl SortitionState {
    /// Draws one uniform W-bit secret ticket per validator, encrypts the
    /// tickets and the stake prefix sums.
    pub fn register<R: RngCore>(
        registry: &Registry,
        params: SortitionParams,
        rng: &mut R,
        meter: &CostMeter,
    ) -> Result<SortitionState, SortitionError> {
        params.validate()?;
        let (ctx, key) = FheCtx::new(params.width, meter.clone())?;

        let balances: Vec<u64> = registry.iter().map(|v| v.effective_balance).collect();
        let prefix = build_intervals(&balances)?;
        let total = *prefix.last().expect("prefix always has a zero entry");
        let mask = if params.width == 64 {
            u64::MAX
        } else {
            (1u64 << params.width) - 1
        };
        if total > mask {
            return Err(SortitionError::StakeOverflowsWidth {
                total,
                width: params.width,
            });
        }

        let mut tickets_plain = Vec::with_capacity(registry.len());
        for _ in 0..registry.len() {
            let raw = rng.next_u64();
            tickets_plain.push(if params.width == 64 {
                raw
            } else {
                raw >> (64 - params.width)
            });
        }
        for i in 0..tickets_plain.len() {
            for j in i + 1..tickets_plain.len() {
                if tickets_plain[i] == tickets_plain[j] {
                    return Err(SortitionError::TicketCollision { first: i, second: j });
                }
            }
        }

        let tickets_enc = tickets_plain.iter().map(|&t| ctx.enc(t)).collect();
        let prefix_enc = prefix.iter().map(|&p| ctx.enc(p)).collect();
        Ok(SortitionState {
            params,
            ctx,
            key,
            tickets_plain,
            tickets_enc,
            prefix,
            prefix_enc,
            total,
        })
    }

    pub fn ctx(&self) -> &FheCtx {
        &self.ctx
    }

    pub fn validator_count(&self) -> usize {
        self.tickets_plain.len()
    }

    /// The slot's public draw, reduced into [0, total stake) by
    /// multiplication-shift (bias below 2^-W, and no modulo bias).
    pub fn draw_value(&self, mix: &Digest, slot: u64) -> u64 {
        let d = hash_tagged_parts("sortition-draw", &[mix.as_bytes(), &slot.to_be_bytes()]);
        self.ctx.meter().record(OpKind::Digest);
        let w = self.params.width;
        let raw = if w == 64 { d.to_u64() } else { d.to_u64() >> (64 - w) };
        (((raw as u128) * (self.total as u128)) >> w) as u64
    }

    fn voucher_seed(mix: &Digest, slot: u64) -> u64 {
        hash_tagged_parts(
            "sortition-voucher-seed",
            &[mix.as_bytes(), &slot.to_be_bytes()],
        )
        .to_u64()
    }

    /// Plaintext reference path: the unique i with
    /// prefix[i] <= r < prefix[i+1].
    pub fn oracle_winner(&self, r: u64) -> usize {
        debug_assert!(r < self.total);
        self.prefix.partition_point(|&p| p <= r) - 1
    }

    /// Runs the slot's election. Full mode evaluates the encrypted
    /// interval-membership circuit, selects the winner's encrypted ticket,
    /// and publishes the decrypted PRF voucher; simplified mode resolves
    /// the same winner from the plaintext oracle and skips the voucher.
    pub fn run_slot(&self, mix: &Digest, slot: u64) -> SlotElection {
        let r = self.draw_value(mix, slot);
        let oracle = self.oracle_winner(r);
        if self.params.mode == SortitionMode::Simplified {
            return SlotElection {
                slot,
                winner: oracle,
                voucher: None,
            };
        }

        let ctx = &self.ctx;
        let enc_r = ctx.enc(r);
        let zero = ctx.enc(0);
        let mut acc = ctx.enc(0);
        let mut indicator_ones = Vec::new();
        for i in 0..self.tickets_enc.len() {
            let below_lo = ctx.h_cmp_lt(&enc_r, &self.prefix_enc[i]);
            let at_or_above_lo = ctx.h_xor_const(&below_lo, 1);
            let below_hi = ctx.h_cmp_lt(&enc_r, &self.prefix_enc[i + 1]);
            let in_interval = ctx.h_and(&at_or_above_lo, &below_hi);
            let pick = ctx.h_select(&in_interval, &self.tickets_enc[i], &zero);
            acc = ctx.h_add(&acc, &pick);
            if ctx.dec(&self.key, &in_interval) == 1 {
                indicator_ones.push(i);
            }
        }
        assert_eq!(
            indicator_ones,
            vec![oracle],
            "exactly the oracle winner's indicator bit decrypts to 1"
        );

        let seed = Self::voucher_seed(mix, slot);
        self.ctx.meter().record(OpKind::Digest);
        let voucher = ctx.dec(&self.key, &prf_enc(ctx, &acc, seed));
        // a published voucher must single out the winner: every other
        // validator's local recomputation has to miss
        for (v, &ticket) in self.tickets_plain.iter().enumerate() {
            assert_eq!(
                prf_plain(ticket, seed) == voucher,
                v == oracle,
                "voucher must match exactly the winning ticket"
            );
        }
        SlotElection {
            slot,
            winner: oracle,
            voucher: Some(voucher),
        }
    }

    /// What validator `v` computes privately from their own ticket.
    pub fn local_voucher(&self, v: usize, mix: &Digest, slot: u64) -> u64 {
        prf_plain(self.tickets_plain[v], Self::voucher_seed(mix, slot))
    }

    /// `v` claims the slot if their local voucher matches the published
    /// one. In simplified mode (no published voucher) the election winner
    /// claims directly.
    pub fn claim_slot(
        &self,
        v: usize,
        mix: &Digest,
        election: &SlotElection,
    ) -> Option<VoucherClaim> {
        match election.voucher {
            Some(published) => {
                let recomputed = self.local_voucher(v, mix, election.slot);
                (recomputed == published).then_some(VoucherClaim {
                    claimant: v,
                    voucher_recomputed: recomputed,
                })
            }
            None => (v == election.winner).then_some(VoucherClaim {
                claimant: v,
                voucher_recomputed: 0,
            }),
        }
    }

    /// Block validation: the claim must reproduce the published voucher
    /// word. Simplified mode skips verification by construction.
    pub fn verify_claim(&self, claim: &VoucherClaim, election: &SlotElection) -> bool {
        match election.voucher {
            Some(published) => claim.voucher_recomputed == published,
            None => claim.claimant == election.winner,
        }
    }
}
