//! Single secret leader election via shuffled trackers. Candidates are
//! sampled publicly from registered trackers (linkable at that instant),
//! then proposers iteratively re-randomize and permute them over a round;
//! by the time a tracker is mapped to a slot nobody but its owner can tell
//! whose it is, and the owner claims the slot with an ownership proof.
//!
//! Pipeline: the list selected at the end of round j−1 is shuffled during
//! round j, frozen into round j+1's proposer list at the end of round j,
//! while a fresh list is selected for round j+1 to shuffle. The first list
//! is selected at genesis and shuffled through rounds 0 and 1 (the warm-up
//! rounds, driven by the public baseline election); the first secret-leader
//! round is round 2.

use crate::digest::{hash_tagged_parts, Digest};
use crate::fhe::{CostMeter, OpKind};
use crate::group::{
    make_tracker, prove_ownership, random_nonzero_scalar, shuffle, verify_ownership,
    verify_shuffle, GroupBackend, GroupError, OwnershipProof, ShuffleTranscript, Tracker,
};
use crate::randao::SLOTS_PER_EPOCH;
use crate::validator::Registry;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const WARM_UP_ROUNDS: u64 = 2;

/// Cap and floor on the scaled proposer-list size. The cap is the mainnet
/// list size; the floor keeps rounds at least one epoch long.
const PROPOSERS_CAP: usize = 8192;
const PROPOSERS_FLOOR: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WhiskError {
    #[error("whisk needs at least 8 validators, got {0}")]
    TooFewValidators(usize),
    #[error("whisk params: {0}")]
    InvalidParams(String),
    #[error("block at slot {slot} rejected: {reason}")]
    InvalidBlock { slot: u64, reason: String },
    #[error("no frozen proposer list covers slot {0}")]
    NoProposerList(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhiskParams {
    pub candidates_per_round: usize,
    pub proposers_per_round: usize,
    pub round_length_slots: u64,
    pub trackers_per_shuffle: usize,
}

impl WhiskParams {
    /// Sanity rules any parameter set (scaled or hand-overridden) must
    /// satisfy for the pipeline to work.
    pub fn validate(&self) -> Result<(), WhiskError> {
        let (c, p, r, m) = (
            self.candidates_per_round,
            self.proposers_per_round,
            self.round_length_slots,
            self.trackers_per_shuffle,
        );
        if c != 2 * p {
            return Err(WhiskError::InvalidParams(format!(
                "candidates_per_round must be twice proposers_per_round, got {c} vs {p}"
            )));
        }
        if r != p as u64 {
            return Err(WhiskError::InvalidParams(format!(
                "round_length_slots must equal proposers_per_round, got {r} vs {p}"
            )));
        }
        if r % SLOTS_PER_EPOCH != 0 {
            return Err(WhiskError::InvalidParams(format!(
                "round_length_slots must be a multiple of {SLOTS_PER_EPOCH}, got {r}"
            )));
        }
        if m == 0 || m > c {
            return Err(WhiskError::InvalidParams(format!(
                "trackers_per_shuffle must be in 1..={c}, got {m}"
            )));
        }
        if (m as u64) * r < c as u64 {
            return Err(WhiskError::InvalidParams(format!(
                "one round must be able to touch every candidate: {m} per slot over {r} slots < {c}"
            )));
        }
        Ok(())
    }

    pub fn warm_up_slots(&self) -> u64 {
        WARM_UP_ROUNDS * self.round_length_slots
    }
}

/// Shrinks the mainnet list sizes proportionally to the validator count,
/// keeping the 2:1 candidate:proposer ratio and one proposer per slot.
pub fn scale_params(validator_count: usize) -> Result<WhiskParams, WhiskError> {
    if validator_count < 8 {
        return Err(WhiskError::TooFewValidators(validator_count));
    }
    let p = (validator_count / 8)
        .next_power_of_two()
        .clamp(PROPOSERS_FLOOR, PROPOSERS_CAP);
    let c = 2 * p;
    let params = WhiskParams {
        candidates_per_round: c,
        proposers_per_round: p,
        round_length_slots: p as u64,
        trackers_per_shuffle: (c / 128).max(2),
    };
    params.validate().expect("scaling rule satisfies its own invariants");
    Ok(params)
}

/// Candidate list in its shuffle phase, with the simulator-side ground
/// truth needed to resolve proposals and attacks later. `selected_owners`
/// is by selection-time position and never changes; the parallel vectors
/// are permuted along with the trackers.
#[derive(Clone, Debug)]
struct Cohort<B: GroupBackend> {
    /// Selection-event counter; the genesis list is 0.
    id: u64,
    trackers: Vec<Tracker<B>>,
    /// Owner of the entry that sat at position p when the list was drawn.
    selected_owners: Vec<usize>,
    /// Selection-time position of the entry currently at index i.
    origin_position: Vec<usize>,
    /// Whether the entry currently at index i is still linkable by
    /// observers (true until its first re-randomization).
    linked: Vec<bool>,
    shuffle_offset: usize,
}

/// Proposer list frozen for one round; index i serves slot start_slot + i.
#[derive(Clone, Debug)]
pub struct FrozenRound<B: GroupBackend> {
    start_slot: u64,
    cohort_id: u64,
    trackers: Vec<Tracker<B>>,
    owners: Vec<usize>,
    origin_positions: Vec<usize>,
}

impl<B: GroupBackend> FrozenRound<B> {
    pub fn start_slot(&self) -> u64 {
        self.start_slot
    }

    /// Selection event this list was frozen from.
    pub fn cohort_id(&self) -> u64 {
        self.cohort_id
    }

    fn offset(&self, slot: u64) -> Option<usize> {
        let len = self.trackers.len() as u64;
        (self.start_slot..self.start_slot + len)
            .contains(&slot)
            .then(|| (slot - self.start_slot) as usize)
    }

    pub fn tracker_for_slot(&self, slot: u64) -> Option<&Tracker<B>> {
        self.offset(slot).map(|i| &self.trackers[i])
    }

    /// Ground-truth owner; simulator-side only, never part of any view.
    pub fn owner_of_slot(&self, slot: u64) -> Option<usize> {
        self.offset(slot).map(|i| self.owners[i])
    }

    /// Selection-time candidate-list position the slot's tracker came from.
    pub fn origin_position_of_slot(&self, slot: u64) -> Option<usize> {
        self.offset(slot).map(|i| self.origin_positions[i])
    }
}

/// Block extension for this mechanism: the per-slot shuffle transcript,
/// plus (outside warm-up) the proposer's anonymous ownership claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhiskPayload<B: GroupBackend> {
    pub claim: Option<OwnershipProof<B>>,
    pub transcript: ShuffleTranscript<B>,
}

impl<B: GroupBackend> WhiskPayload<B> {
    /// Wire form: claim flag and bytes, then for each position i of the
    /// shuffle its source index, the randomizer applied to input i, and
    /// output i. Inputs are omitted; verifiers read them from their own
    /// state.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match &self.claim {
            Some(proof) => {
                out.push(1);
                out.extend(proof.to_bytes());
            }
            None => out.push(0),
        }
        out.extend((self.transcript.permutation.len() as u32).to_be_bytes());
        for i in 0..self.transcript.permutation.len() {
            out.extend((self.transcript.permutation[i] as u32).to_be_bytes());
            out.extend(B::scalar_to_bytes(&self.transcript.randomizers[i]));
            out.extend(self.transcript.outputs[i].to_bytes());
        }
        out
    }

    /// Wire length for a payload under `params`.
    pub fn byte_len(params: &WhiskParams, with_claim: bool) -> usize {
        let claim = if with_claim {
            B::ELEMENT_LEN + B::SCALAR_LEN + crate::digest::DIGEST_LEN
        } else {
            0
        };
        let per_entry = 4 + B::SCALAR_LEN + 2 * B::ELEMENT_LEN;
        1 + claim + 4 + params.trackers_per_shuffle * per_entry
    }

    /// Rebuilds the payload against the inputs the verifier holds.
    pub fn from_bytes(bytes: &[u8], inputs: &[Tracker<B>]) -> Result<Self, GroupError> {
        let err = |expected: usize| GroupError::WrongLength {
            expected,
            got: bytes.len(),
        };
        let proof_len = B::ELEMENT_LEN + B::SCALAR_LEN + crate::digest::DIGEST_LEN;
        if bytes.is_empty() {
            return Err(err(1));
        }
        let (claim, mut at) = match bytes[0] {
            0 => (None, 1),
            1 => {
                if bytes.len() < 1 + proof_len {
                    return Err(err(1 + proof_len));
                }
                (
                    Some(OwnershipProof::<B>::from_bytes(&bytes[1..1 + proof_len])?),
                    1 + proof_len,
                )
            }
            _ => return Err(GroupError::MalformedElement),
        };
        if bytes.len() < at + 4 {
            return Err(err(at + 4));
        }
        let m = u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        at += 4;
        if m != inputs.len() {
            return Err(GroupError::WrongLength {
                expected: inputs.len(),
                got: m,
            });
        }
        let per_entry = 4 + B::SCALAR_LEN + 2 * B::ELEMENT_LEN;
        if bytes.len() != at + m * per_entry {
            return Err(err(at + m * per_entry));
        }
        let mut permutation = Vec::with_capacity(m);
        let mut randomizers = Vec::with_capacity(m);
        let mut outputs = Vec::with_capacity(m);
        for _ in 0..m {
            permutation
                .push(u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap()) as usize);
            at += 4;
            randomizers.push(B::scalar_from_bytes(&bytes[at..at + B::SCALAR_LEN])?);
            at += B::SCALAR_LEN;
            outputs.push(Tracker::<B>::from_bytes(&bytes[at..at + 2 * B::ELEMENT_LEN])?);
            at += 2 * B::ELEMENT_LEN;
        }
        Ok(WhiskPayload {
            claim,
            transcript: ShuffleTranscript {
                inputs: inputs.to_vec(),
                outputs,
                permutation,
                randomizers,
            },
        })
    }
}

#[derive(Clone, Debug)]
pub struct WhiskState<B: GroupBackend> {
    pub params: WhiskParams,
    registered: Vec<Tracker<B>>,
    secrets: Vec<B::Scalar>,
    cohort: Cohort<B>,
    frozen: Option<FrozenRound<B>>,
}

fn selection_seed(mix: &Digest, round: u64) -> Digest {
    hash_tagged_parts(
        "whisk-candidate-seed",
        &[mix.as_bytes(), &round.to_be_bytes()],
    )
}

/// One stake-weighted draw from the registry, by rejection sampling
/// (uniform candidate kept with probability balance/max_balance).
fn stake_weighted_entry(
    registry: &Registry,
    seed: &Digest,
    entry: u64,
    meter: &CostMeter,
) -> usize {
    let n = registry.len() as u64;
    let b_max = registry.max_effective_balance() as u128;
    for attempt in 0u64.. {
        let draw = hash_tagged_parts(
            "whisk-candidate-draw",
            &[seed.as_bytes(), &entry.to_be_bytes(), &attempt.to_be_bytes()],
        );
        meter.record(OpKind::Digest);
        let candidate = (draw.to_u64() % n) as usize;
        let r = u64::from_be_bytes(draw.as_bytes()[8..16].try_into().unwrap());
        if (r as u128) * b_max <= (registry.get(candidate).effective_balance as u128) * (u64::MAX as u128) {
            return candidate;
        }
    }
    unreachable!("the max-balance validator is always accepted")
}

fn shuffle_offset(mix: &Digest, round: u64, candidates: usize) -> usize {
    let d = hash_tagged_parts(
        "whisk-shuffle-offset",
        &[mix.as_bytes(), &round.to_be_bytes()],
    );
    (d.to_u64() % candidates as u64) as usize
}

/// Draws a full candidate list (with replacement, stake-weighted). The
/// position → validator mapping is public knowledge at this instant.
fn select_cohort<B: GroupBackend>(
    registry: &Registry,
    registered: &[Tracker<B>],
    mix: &Digest,
    round: u64,
    id: u64,
    params: &WhiskParams,
    meter: &CostMeter,
) -> Cohort<B> {
    let seed = selection_seed(mix, round);
    meter.record(OpKind::Digest);
    let c = params.candidates_per_round;
    let mut trackers = Vec::with_capacity(c);
    let mut selected_owners = Vec::with_capacity(c);
    for entry in 0..c {
        let owner = stake_weighted_entry(registry, &seed, entry as u64, meter);
        trackers.push(registered[owner].clone());
        selected_owners.push(owner);
    }
    meter.record(OpKind::Digest);
    Cohort {
        id,
        trackers,
        selected_owners,
        origin_position: (0..c).collect(),
        linked: vec![true; c],
        shuffle_offset: shuffle_offset(mix, round, c),
    }
}

impl<B: GroupBackend> WhiskState<B> {
    /// Registers one long-term tracker per validator and draws the first
    /// candidate list, which rounds 0 and 1 will shuffle.
    pub fn genesis<R: RngCore>(
        registry: &Registry,
        params: WhiskParams,
        selection_mix: &Digest,
        rng: &mut R,
        meter: &CostMeter,
    ) -> Result<WhiskState<B>, WhiskError> {
        params.validate()?;
        let mut registered = Vec::with_capacity(registry.len());
        let mut secrets = Vec::with_capacity(registry.len());
        for _ in 0..registry.len() {
            let secret = random_nonzero_scalar::<B, _>(rng);
            let blind = random_nonzero_scalar::<B, _>(rng);
            let tracker =
                make_tracker::<B>(&secret, &blind).expect("secret and blind drawn nonzero");
            meter.record_n(OpKind::GroupScalarMul, 2);
            secrets.push(secret);
            registered.push(tracker);
        }
        let cohort = select_cohort(registry, &registered, selection_mix, 0, 0, &params, meter);
        Ok(WhiskState {
            params,
            registered,
            secrets,
            cohort,
            frozen: None,
        })
    }

    pub fn round_of_slot(&self, slot: u64) -> u64 {
        slot / self.params.round_length_slots
    }

    /// Rounds before the first frozen proposer list is in use.
    pub fn is_warm_up_slot(&self, slot: u64) -> bool {
        self.round_of_slot(slot) < WARM_UP_ROUNDS
    }

    pub fn frozen(&self) -> Option<&FrozenRound<B>> {
        self.frozen.as_ref()
    }

    /// Simulator-side secret accessor (proposal resolution and tests); the
    /// adversary view never touches this.
    pub fn secret_of(&self, validator: usize) -> &B::Scalar {
        &self.secrets[validator]
    }

    pub fn registered_tracker(&self, validator: usize) -> &Tracker<B> {
        &self.registered[validator]
    }

    /// Candidate-list linkage as observers currently see it: the owner at
    /// each position, until the entry's first re-randomization erases it.
    pub fn candidate_linkage(&self) -> Vec<Option<usize>> {
        (0..self.cohort.trackers.len())
            .map(|i| {
                self.cohort.linked[i]
                    .then(|| self.cohort.selected_owners[self.cohort.origin_position[i]])
            })
            .collect()
    }

    pub fn linked_entry_count(&self) -> usize {
        self.cohort.linked.iter().filter(|&&l| l).count()
    }

    /// Positions this slot's proposer must shuffle: a window of m
    /// consecutive positions (mod C) walked across the list over the round,
    /// so a full round touches every entry.
    pub fn shuffle_window(&self, slot: u64) -> Vec<usize> {
        let c = self.params.candidates_per_round;
        let m = self.params.trackers_per_shuffle;
        let slot_in_round = (slot % self.params.round_length_slots) as usize;
        (0..m)
            .map(|k| (self.cohort.shuffle_offset + slot_in_round * m + k) % c)
            .collect()
    }

    fn window_trackers(&self, window: &[usize]) -> Vec<Tracker<B>> {
        window.iter().map(|&p| self.cohort.trackers[p].clone()).collect()
    }

    fn claim_context(slot: u64) -> Vec<u8> {
        let mut ctx = b"whisk-claim".to_vec();
        ctx.extend(slot.to_be_bytes());
        ctx
    }

    /// Builds the block payload for `slot` on behalf of its proposer:
    /// the shuffle of this slot's window, plus an ownership claim for the
    /// slot tracker outside warm-up.
    pub fn make_payload<R: RngCore>(
        &self,
        slot: u64,
        rng: &mut R,
        meter: &CostMeter,
    ) -> Result<WhiskPayload<B>, WhiskError> {
        let window = self.shuffle_window(slot);
        let inputs = self.window_trackers(&window);
        let (_, transcript) = shuffle::<B, _>(&inputs, rng);
        meter.record_n(OpKind::GroupScalarMul, 2 * inputs.len() as u64);
        let claim = if self.is_warm_up_slot(slot) {
            None
        } else {
            let frozen = self.frozen.as_ref().ok_or(WhiskError::NoProposerList(slot))?;
            let tracker = frozen
                .tracker_for_slot(slot)
                .ok_or(WhiskError::NoProposerList(slot))?;
            let owner = frozen.owner_of_slot(slot).expect("tracker exists");
            let proof = prove_ownership::<B, _>(
                tracker,
                &self.secrets[owner],
                &Self::claim_context(slot),
                rng,
            );
            meter.record(OpKind::GroupScalarMul);
            meter.record(OpKind::Digest);
            Some(proof)
        };
        Ok(WhiskPayload { claim, transcript })
    }

    /// Verifies and applies a block's payload: outside warm-up the claim
    /// must prove ownership of the slot tracker; the transcript must replay
    /// against the slot's window. On success the window entries are
    /// replaced and their linkage erased.
    pub fn apply_block(
        &mut self,
        slot: u64,
        payload: &WhiskPayload<B>,
        meter: &CostMeter,
    ) -> Result<(), WhiskError> {
        let reject = |reason: &str| WhiskError::InvalidBlock {
            slot,
            reason: reason.to_string(),
        };
        if self.is_warm_up_slot(slot) {
            if payload.claim.is_some() {
                return Err(reject("warm-up blocks carry no ownership claim"));
            }
        } else {
            let frozen = self.frozen.as_ref().ok_or(WhiskError::NoProposerList(slot))?;
            let tracker = frozen
                .tracker_for_slot(slot)
                .ok_or(WhiskError::NoProposerList(slot))?;
            let claim = payload.claim.as_ref().ok_or_else(|| reject("missing claim"))?;
            meter.record_n(OpKind::GroupScalarMul, 2);
            meter.record(OpKind::GroupAdd);
            meter.record(OpKind::Digest);
            if !verify_ownership::<B>(tracker, claim, &Self::claim_context(slot)) {
                return Err(reject("ownership claim does not verify"));
            }
        }

        let window = self.shuffle_window(slot);
        let inputs = self.window_trackers(&window);
        meter.record_n(OpKind::GroupScalarMul, 2 * inputs.len() as u64);
        if !verify_shuffle::<B>(&inputs, &payload.transcript.outputs, &payload.transcript) {
            return Err(reject("shuffle transcript does not verify"));
        }

        let old_origin: Vec<usize> = window
            .iter()
            .map(|&p| self.cohort.origin_position[p])
            .collect();
        for (i, &pos) in window.iter().enumerate() {
            let src = payload.transcript.permutation[i];
            self.cohort.trackers[pos] = payload.transcript.outputs[i].clone();
            self.cohort.origin_position[pos] = old_origin[src];
            self.cohort.linked[pos] = false;
        }
        Ok(())
    }

    /// Round-boundary processing (the "shuffle end" event). After the first
    /// warm-up round the shuffled list keeps shuffling; after every later
    /// round it is frozen into the next round's proposer list and a fresh
    /// candidate list is drawn.
    pub fn end_round(
        &mut self,
        registry: &Registry,
        completed_round: u64,
        mix: &Digest,
        meter: &CostMeter,
    ) {
        let next_round = completed_round + 1;
        if completed_round + 1 < WARM_UP_ROUNDS {
            // the first list gets a second round of shuffling
            self.cohort.shuffle_offset =
                shuffle_offset(mix, next_round, self.params.candidates_per_round);
            meter.record(OpKind::Digest);
            return;
        }

        let freeze_seed = hash_tagged_parts(
            "whisk-proposer-freeze",
            &[mix.as_bytes(), &next_round.to_be_bytes()],
        );
        meter.record(OpKind::Digest);
        let mut rng = ChaCha20Rng::from_seed(*freeze_seed.as_bytes());
        let positions = rand::seq::index::sample(
            &mut rng,
            self.params.candidates_per_round,
            self.params.proposers_per_round,
        )
        .into_vec();
        let frozen = FrozenRound {
            start_slot: next_round * self.params.round_length_slots,
            cohort_id: self.cohort.id,
            trackers: positions.iter().map(|&p| self.cohort.trackers[p].clone()).collect(),
            owners: positions
                .iter()
                .map(|&p| self.cohort.selected_owners[self.cohort.origin_position[p]])
                .collect(),
            origin_positions: positions
                .iter()
                .map(|&p| self.cohort.origin_position[p])
                .collect(),
        };
        self.frozen = Some(frozen);
        self.cohort = select_cohort(
            registry,
            &self.registered,
            mix,
            next_round,
            self.cohort.id + 1,
            &self.params,
            meter,
        );
    }

    /// Selection-event counter of the list currently being shuffled.
    pub fn shuffling_cohort_id(&self) -> u64 {
        self.cohort.id
    }
}
