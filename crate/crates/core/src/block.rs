//! Block structure: a slot proposal carrying the proposer's claim, their
//! RANDAO reveal, and the mechanism-specific payload.

use crate::group::GroupBackend;
use crate::sortition::VoucherClaim;
use crate::whisk::WhiskPayload;

/// How the block names its proposer. The baseline and sortition publish the
/// validator index; a steady-state shuffle-election block stays anonymous
/// and proves slot ownership inside its payload instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProposerClaim {
    Public(usize),
    Anonymous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockPayload<B: GroupBackend> {
    Empty,
    Whisk(WhiskPayload<B>),
    Sortition(VoucherClaim),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeaconBlock<B: GroupBackend> {
    pub slot: u64,
    pub proposer_claim: ProposerClaim,
    pub randao_reveal: [u8; 32],
    pub payload: BlockPayload<B>,
}

impl<B: GroupBackend> BeaconBlock<B> {
    /// Wire form: slot, claim tag (+ index), reveal, payload tag + payload
    /// bytes. Used to pin payload sizes and check determinism; the
    /// simulator itself passes blocks by value.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend(self.slot.to_be_bytes());
        match self.proposer_claim {
            ProposerClaim::Public(v) => {
                out.push(1);
                out.extend((v as u32).to_be_bytes());
            }
            ProposerClaim::Anonymous => out.push(0),
        }
        out.extend(self.randao_reveal);
        match &self.payload {
            BlockPayload::Empty => out.push(0),
            BlockPayload::Whisk(p) => {
                out.push(1);
                out.extend(p.to_bytes());
            }
            BlockPayload::Sortition(c) => {
                out.push(2);
                out.extend((c.claimant as u32).to_be_bytes());
                out.extend(c.voucher_recomputed.to_be_bytes());
            }
        }
        out
    }
}
