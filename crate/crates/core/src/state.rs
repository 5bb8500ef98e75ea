//! The simplified beacon chain state machine: slot progression, RANDAO
//! accumulation, block application, epoch processing, and the per-mechanism
//! proposer resolution that drives all of it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::block::{BeaconBlock, BlockPayload, ProposerClaim};
use crate::digest::hash_tagged_parts;
use crate::fhe::{CostMeter, CostSnapshot, OpKind};
use crate::group::{GroupBackend, Tracker};
use crate::randao::{epoch_of_slot, is_epoch_boundary, randao_reveal, RandaoMixes};
use crate::rng::stream;
use crate::sortition::{SlotElection, SortitionError, SortitionParams, SortitionState};
use crate::statusquo::{epoch_schedule, select_proposer};
use crate::validator::{Registry, RegistryError};
use crate::whisk::{scale_params, WhiskError, WhiskParams, WhiskState};
use rand::RngCore;

#[derive(Debug, Error)]
pub enum GenesisError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Whisk(#[from] WhiskError),
    #[error(transparent)]
    Sortition(#[from] SortitionError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SlotError {
    #[error("block for slot {block_slot} processed at slot {state_slot}")]
    WrongSlot { block_slot: u64, state_slot: u64 },
    #[error("schedule for epoch {epoch} requested at epoch {current}; horizon is current and next")]
    HorizonExceeded { epoch: u64, current: u64 },
}

/// Mechanism selection plus its parameters, as resolved from configuration.
#[derive(Clone, Debug)]
pub enum MechanismInit {
    StatusQuo,
    /// `None` scales the list sizes from the validator count.
    Whisk(Option<WhiskParams>),
    Sortition(SortitionParams),
}

#[derive(Debug)]
pub enum MechanismState<B: GroupBackend> {
    StatusQuo,
    Whisk(WhiskState<B>),
    Sortition {
        state: SortitionState,
        /// This slot's election, run once at proposer resolution and
        /// consumed by claim verification.
        election: Option<SlotElection>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotStatus {
    Proposed,
    MissedByAttack,
    MissedIdle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotOutcome {
    pub slot: u64,
    /// Ground-truth proposer for the slot, whether or not they proposed.
    pub proposer: usize,
    pub status: SlotStatus,
    /// A block arrived but failed validation (counted as missed).
    pub invalid: bool,
}

/// Why a slot has no block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MissReason {
    Attack,
    Idle,
}

/// Per-slot input to the state machine.
#[derive(Debug)]
pub enum SlotInput<B: GroupBackend> {
    Proposal(BeaconBlock<B>),
    Missed(MissReason),
}

/// Cost deltas attributed to epoch-boundary work during a slot transition,
/// split so round-end shuffle bookkeeping is visible as its own phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochCostSplit {
    pub epoch: CostSnapshot,
    pub shuffle_end: CostSnapshot,
}

/// A lookahead schedule entry. The baseline (and shuffle-election warm-up)
/// publishes validator indices; steady-state shuffle election exposes only
/// the frozen tracker, which names nobody.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleEntry<B: GroupBackend> {
    Public { slot: u64, validator: usize },
    AnonymousTracker { slot: u64, tracker: Tracker<B> },
}

#[derive(Debug)]
pub struct BeaconState<B: GroupBackend> {
    pub slot: u64,
    pub mixes: RandaoMixes,
    pub registry: Registry,
    pub mechanism: MechanismState<B>,
    meter: CostMeter,
    resolved: Option<(u64, usize)>,
}

pub fn init_genesis<B: GroupBackend>(
    validator_count: usize,
    balances: &[u64],
    mechanism: MechanismInit,
    rng_seed: u64,
) -> Result<BeaconState<B>, GenesisError> {
    let meter = CostMeter::new();
    let registry = Registry::new(validator_count, balances, |i| {
        *hash_tagged_parts(
            "validator-secret",
            &[&rng_seed.to_be_bytes(), &(i as u64).to_be_bytes()],
        )
        .as_bytes()
    })?;
    let mixes = RandaoMixes::genesis(rng_seed);
    let mechanism = match mechanism {
        MechanismInit::StatusQuo => MechanismState::StatusQuo,
        MechanismInit::Whisk(params) => {
            let params = match params {
                Some(p) => {
                    p.validate()?;
                    p
                }
                None => scale_params(validator_count)?,
            };
            let mut rng = stream(rng_seed, "whisk-secrets");
            MechanismState::Whisk(WhiskState::genesis(
                &registry,
                params,
                &mixes.selection_mix(0),
                &mut rng,
                &meter,
            )?)
        }
        MechanismInit::Sortition(params) => {
            let mut rng = stream(rng_seed, "sortition-tickets");
            MechanismState::Sortition {
                state: SortitionState::register(&registry, params, &mut rng, &meter)?,
                election: None,
            }
        }
    };
    Ok(BeaconState {
        slot: 0,
        mixes,
        registry,
        mechanism,
        meter,
        resolved: None,
    })
}

impl<B: GroupBackend> BeaconState<B> {
    pub fn meter(&self) -> &CostMeter {
        &self.meter
    }

    pub fn current_epoch(&self) -> u64 {
        epoch_of_slot(self.slot)
    }

    /// Ground-truth proposer of the current slot. Under sortition this runs
    /// the slot's election (every node evaluates the circuit whether or not
    /// the winner shows up); the result is cached for the rest of the slot.
    pub fn resolve_proposer(&mut self) -> usize {
        if let Some((slot, proposer)) = self.resolved {
            if slot == self.slot {
                return proposer;
            }
        }
        let epoch = self.current_epoch();
        let mix = self.mixes.selection_mix(epoch);
        let proposer = match &mut self.mechanism {
            MechanismState::StatusQuo => {
                select_proposer(&self.registry, &mix, self.slot, &self.meter)
            }
            MechanismState::Whisk(w) => {
                if w.is_warm_up_slot(self.slot) {
                    select_proposer(&self.registry, &mix, self.slot, &self.meter)
                } else {
                    w.frozen()
                        .and_then(|f| f.owner_of_slot(self.slot))
                        .expect("a frozen proposer list covers every steady slot")
                }
            }
            MechanismState::Sortition { state, election } => {
                let e = state.run_slot(&mix, self.slot);
                let winner = e.winner;
                *election = Some(e);
                winner
            }
        };
        self.resolved = Some((self.slot, proposer));
        proposer
    }

    /// Builds the current slot's block on behalf of its true proposer.
    pub fn build_block<R: RngCore>(&mut self, rng: &mut R) -> Result<BeaconBlock<B>, WhiskError> {
        let proposer = self.resolve_proposer();
        let epoch = self.current_epoch();
        let randao_reveal = randao_reveal(self.registry.get(proposer), epoch);
        let (proposer_claim, payload) = match &self.mechanism {
            MechanismState::StatusQuo => (ProposerClaim::Public(proposer), BlockPayload::Empty),
            MechanismState::Whisk(w) => {
                let payload = w.make_payload(self.slot, rng, &self.meter)?;
                let claim = if w.is_warm_up_slot(self.slot) {
                    ProposerClaim::Public(proposer)
                } else {
                    ProposerClaim::Anonymous
                };
                (claim, BlockPayload::Whisk(payload))
            }
            MechanismState::Sortition { state, election } => {
                let election = election.as_ref().expect("resolved above");
                let mix = self.mixes.selection_mix(epoch);
                let claim = state
                    .claim_slot(proposer, &mix, election)
                    .expect("the ground-truth winner's claim always matches");
                (ProposerClaim::Public(proposer), BlockPayload::Sortition(claim))
            }
        };
        Ok(BeaconBlock {
            slot: self.slot,
            proposer_claim,
            randao_reveal,
            payload,
        })
    }

    fn validate_and_apply(&mut self, block: &BeaconBlock<B>, proposer: usize) -> Result<(), String> {
        let epoch = self.current_epoch();
        match (&mut self.mechanism, &block.payload) {
            (MechanismState::StatusQuo, BlockPayload::Empty) => {
                if block.proposer_claim != ProposerClaim::Public(proposer) {
                    return Err("proposer claim does not match the schedule".into());
                }
            }
            (MechanismState::Whisk(w), BlockPayload::Whisk(payload)) => {
                let expect_public = w.is_warm_up_slot(block.slot);
                match block.proposer_claim {
                    ProposerClaim::Public(v) if expect_public => {
                        if v != proposer {
                            return Err("proposer claim does not match the schedule".into());
                        }
                    }
                    ProposerClaim::Anonymous if !expect_public => {}
                    _ => return Err("wrong proposer claim kind for this round".into()),
                }
                w.apply_block(block.slot, payload, &self.meter)
                    .map_err(|e| e.to_string())?;
            }
            (MechanismState::Sortition { state, election }, BlockPayload::Sortition(claim)) => {
                let election = election.as_ref().expect("resolved before processing");
                if block.proposer_claim != ProposerClaim::Public(claim.claimant) {
                    return Err("claimant and proposer claim disagree".into());
                }
                if !state.verify_claim(claim, election) {
                    return Err("voucher claim does not match the published voucher".into());
                }
            }
            _ => return Err("payload kind does not match the mechanism".into()),
        }
        // public proposers also prove their reveal is the scheduled one;
        // anonymous blocks can't be checked without an identity
        if let ProposerClaim::Public(v) = block.proposer_claim {
            if block.randao_reveal != randao_reveal(self.registry.get(v), epoch) {
                return Err("reveal does not belong to the claimed proposer".into());
            }
        }
        Ok(())
    }

    /// Advances the chain by one slot. A proposal is validated and applied
    /// (RANDAO mixed in, payload applied); an invalid proposal degrades to
    /// a missed slot with the `invalid` flag. Epoch processing runs on
    /// boundary slots and its cost is returned split by phase.
    pub fn process_slot(
        &mut self,
        input: SlotInput<B>,
    ) -> Result<(SlotOutcome, EpochCostSplit), SlotError> {
        let proposer = self.resolve_proposer();
        let slot = self.slot;
        let epoch = self.current_epoch();

        let (status, invalid) = match input {
            SlotInput::Proposal(block) => {
                if block.slot != slot {
                    return Err(SlotError::WrongSlot {
                        block_slot: block.slot,
                        state_slot: slot,
                    });
                }
                match self.validate_and_apply(&block, proposer) {
                    Ok(()) => {
                        self.mixes.accumulate(epoch, &block.randao_reveal);
                        self.meter.record(OpKind::Digest);
                        (SlotStatus::Proposed, false)
                    }
                    Err(_) => (SlotStatus::MissedIdle, true),
                }
            }
            SlotInput::Missed(MissReason::Attack) => (SlotStatus::MissedByAttack, false),
            SlotInput::Missed(MissReason::Idle) => (SlotStatus::MissedIdle, false),
        };

        let mut split = EpochCostSplit::default();
        if is_epoch_boundary(slot) {
            let before = self.meter.snapshot();
            if let MechanismState::Whisk(w) = &mut self.mechanism {
                if (slot + 1) % w.params.round_length_slots == 0 {
                    let completed_round = slot / w.params.round_length_slots;
                    let mix = *self.mixes.current(epoch);
                    w.end_round(&self.registry, completed_round, &mix, &self.meter);
                }
            }
            let after_rounds = self.meter.snapshot();
            self.mixes.roll_forward(epoch);
            split.shuffle_end = after_rounds.delta_since(&before);
            split.epoch = self.meter.snapshot().delta_since(&after_rounds);
        }

        self.slot += 1;
        self.resolved = None;
        if let MechanismState::Sortition { election, .. } = &mut self.mechanism {
            *election = None;
        }
        Ok((
            SlotOutcome {
                slot,
                proposer,
                status,
                invalid,
            },
            split,
        ))
    }

    /// Publicly derivable lookahead for `epoch` (current or next only).
    /// The baseline exposes the full schedule; shuffle election exposes
    /// anonymized trackers for slots already covered by a frozen list;
    /// sortition exposes nothing.
    pub fn proposer_schedule(&self, epoch: u64) -> Result<Vec<ScheduleEntry<B>>, SlotError> {
        let current = self.current_epoch();
        if epoch < current || epoch > current + 1 {
            return Err(SlotError::HorizonExceeded { epoch, current });
        }
        let mix = self.mixes.selection_mix(epoch);
        let slots = epoch * crate::randao::SLOTS_PER_EPOCH..(epoch + 1) * crate::randao::SLOTS_PER_EPOCH;
        Ok(match &self.mechanism {
            MechanismState::StatusQuo => epoch_schedule(&self.registry, &mix, epoch, &self.meter)
                .into_iter()
                .map(|(slot, validator)| ScheduleEntry::Public { slot, validator })
                .collect(),
            MechanismState::Whisk(w) => {
                if w.is_warm_up_slot(slots.start) {
                    epoch_schedule(&self.registry, &mix, epoch, &self.meter)
                        .into_iter()
                        .map(|(slot, validator)| ScheduleEntry::Public { slot, validator })
                        .collect()
                } else {
                    slots
                        .filter_map(|slot| {
                            w.frozen().and_then(|f| f.tracker_for_slot(slot)).map(
                                |tracker| ScheduleEntry::AnonymousTracker {
                                    slot,
                                    tracker: tracker.clone(),
                                },
                            )
                        })
                        .collect()
                }
            }
            MechanismState::Sortition { .. } => Vec::new(),
        })
    }
}
