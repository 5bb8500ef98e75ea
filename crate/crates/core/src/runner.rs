//! Drives whole simulation runs: one seeded chain per configured seed, the
//! attacker planning against the public view each slot, and the bookkeeping
//! that turns outcomes into a [`RunReport`].

use std::collections::BTreeSet;

use thiserror::Error;

use crate::adversary::{assign_knowledge, dos_attempt, AttackMode, AttackerState};
use crate::config::{ConfigError, SimulationConfig};
use crate::fhe::CostSnapshot;
use crate::group::GroupBackend;
use crate::randao::SLOTS_PER_EPOCH;
use crate::report::{Aggregates, PhaseCosts, RunReport, SlotRecord, REPORT_FORMAT_VERSION};
use crate::rng::stream;
use crate::state::{
    init_genesis, MechanismState, MissReason, SlotInput, SlotStatus,
};
use crate::view::observe;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// A module error surfaced mid-run; the record names the seed it killed.
    #[error("seed {seed}: {reason}")]
    Seed { seed: u64, reason: String },
}

#[derive(Default)]
struct Tally {
    slots: u64,
    proposed: u64,
    missed_by_attack: u64,
    missed_idle: u64,
    suppressed_validators: BTreeSet<usize>,
    victim_proposal_slots: u64,
    victim_suppressed_slots: u64,
    cost: PhaseCosts,
}

impl Tally {
    fn add(
        &mut self,
        status: SlotStatus,
        proposer: usize,
        is_victim_slot: bool,
        block: &CostSnapshot,
        epoch: &CostSnapshot,
        shuffle_end: &CostSnapshot,
    ) {
        self.slots += 1;
        match status {
            SlotStatus::Proposed => self.proposed += 1,
            SlotStatus::MissedByAttack => {
                self.missed_by_attack += 1;
                self.suppressed_validators.insert(proposer);
            }
            SlotStatus::MissedIdle => self.missed_idle += 1,
        }
        if is_victim_slot {
            self.victim_proposal_slots += 1;
            if status == SlotStatus::MissedByAttack {
                self.victim_suppressed_slots += 1;
            }
        }
        self.cost.block.accumulate(block);
        self.cost.epoch.accumulate(epoch);
        self.cost.shuffle_end.accumulate(shuffle_end);
    }

    fn into_aggregates(self, validators: usize, actions: u64, censorship: bool) -> Aggregates {
        let missed = self.missed_by_attack + self.missed_idle;
        let (victim_proposal_slots, victim_suppressed_slots, victim_suppression_rate) =
            if censorship {
                let rate = (self.victim_proposal_slots > 0)
                    .then(|| self.victim_suppressed_slots as f64 / self.victim_proposal_slots as f64);
                (
                    Some(self.victim_proposal_slots),
                    Some(self.victim_suppressed_slots),
                    rate,
                )
            } else {
                (None, None, None)
            };
        Aggregates {
            slots: self.slots,
            proposed_count: self.proposed,
            missed_by_attack: self.missed_by_attack,
            missed_idle: self.missed_idle,
            missed_fraction: missed as f64 / self.slots as f64,
            attack_actions: actions,
            unique_victims_suppressed: self.suppressed_validators.len() as u64,
            affected_fraction: self.suppressed_validators.len() as f64 / validators as f64,
            victim_proposal_slots,
            victim_suppressed_slots,
            victim_suppression_rate,
            cost: self.cost,
        }
    }
}

/// Runs one seed to completion.
pub fn run_single<B: GroupBackend>(
    cfg: &SimulationConfig,
    seed: u64,
) -> Result<RunReport, RunError> {
    cfg.validate()?;
    let fail = |e: String| RunError::Seed { seed, reason: e };

    let mut state = init_genesis::<B>(cfg.validators, &[], cfg.mechanism_init(), seed)
        .map_err(|e| fail(e.to_string()))?;
    let genesis_cost = state.meter().snapshot();

    let mut setup_rng = stream(seed, "attacker-setup");
    assign_knowledge(&mut state.registry, &cfg.attacker, &mut setup_rng);
    let whisk_candidates = match &state.mechanism {
        MechanismState::Whisk(w) => Some(w.params.candidates_per_round),
        _ => None,
    };
    let mut attacker =
        AttackerState::new(cfg.attacker, cfg.validators, whisk_candidates, &mut setup_rng);
    let censorship = matches!(
        cfg.attacker.mode,
        AttackMode::Censorship | AttackMode::AdvancedCensorship
    );

    let warm_up_slots = match &state.mechanism {
        MechanismState::Whisk(w) => w.params.warm_up_slots(),
        _ => 0,
    };
    let total_slots = warm_up_slots + cfg.epochs * SLOTS_PER_EPOCH;

    let mut plan_rng = stream(seed, "attacker-plan");
    let mut block_rng = stream(seed, "block-payloads");
    let mut records = Vec::with_capacity(total_slots as usize);
    let mut steady = Tally::default();
    let mut overall = Tally::default();

    for slot in 0..total_slots {
        let warm_up = slot < warm_up_slots;
        let before = state.meter().snapshot();
        let view = observe(&state);
        attacker.observe(&view);
        let proposer = state.resolve_proposer();

        // The adversary sits out warm-up; it still watched the selection
        // events above.
        let (attacked, suppressed) = if warm_up || cfg.attacker.mode == AttackMode::None {
            (false, false)
        } else {
            let targets = attacker.plan(&view, &mut plan_rng);
            match (&state.mechanism, cfg.attacker.mode) {
                // Sustained attacks on the shuffle election pin candidate
                // positions, not validators: the slot is hit iff its tracker
                // originated at a watched position.
                (MechanismState::Whisk(w), AttackMode::AdvancedDos) => {
                    let origin = w
                        .frozen()
                        .and_then(|f| f.origin_position_of_slot(slot))
                        .expect("every steady slot has a frozen origin");
                    let hit = attacker.watched_positions().binary_search(&origin).is_ok();
                    (hit, hit && dos_attempt(state.registry.get(proposer)))
                }
                _ => {
                    let hit = targets.contains(&proposer);
                    (hit, hit && dos_attempt(state.registry.get(proposer)))
                }
            }
        };

        let (validator, tracker) = match &state.mechanism {
            MechanismState::Whisk(w) if !w.is_warm_up_slot(slot) => {
                let t = w
                    .frozen()
                    .and_then(|f| f.tracker_for_slot(slot))
                    .expect("every steady slot has a frozen tracker");
                (None, Some(hex::encode(&t.to_bytes()[..8])))
            }
            _ => (Some(proposer), None),
        };

        let input = if suppressed {
            SlotInput::Missed(MissReason::Attack)
        } else {
            SlotInput::Proposal(state.build_block(&mut block_rng).map_err(|e| fail(e.to_string()))?)
        };
        let (outcome, split) = state.process_slot(input).map_err(|e| fail(e.to_string()))?;
        let slot_cost = state.meter().snapshot().delta_since(&before);
        let mut boundary = split.epoch;
        boundary.accumulate(&split.shuffle_end);
        let block_cost = slot_cost.delta_since(&boundary);

        let is_victim_slot = censorship && attacker.victims().binary_search(&proposer).is_ok();
        records.push(SlotRecord {
            slot,
            validator,
            tracker,
            status: outcome.status,
            attacked,
            warm_up,
            shuffle_end_ops: split.shuffle_end.total(),
        });
        overall.add(outcome.status, proposer, is_victim_slot, &block_cost, &split.epoch, &split.shuffle_end);
        if !warm_up {
            steady.add(outcome.status, proposer, is_victim_slot, &block_cost, &split.epoch, &split.shuffle_end);
        }
    }

    let actions = attacker.actions;
    Ok(RunReport {
        format_version: REPORT_FORMAT_VERSION,
        config: cfg.clone(),
        seed,
        warm_up_slots,
        genesis_cost,
        steady: steady.into_aggregates(cfg.validators, actions, censorship),
        with_warm_up: overall.into_aggregates(cfg.validators, actions, censorship),
        slots: records,
    })
}

/// Runs every configured seed, in order; reports are independent.
pub fn run<B: GroupBackend>(cfg: &SimulationConfig) -> Result<Vec<RunReport>, RunError> {
    cfg.validate()?;
    cfg.seeds.iter().map(|&seed| run_single::<B>(cfg, seed)).collect()
}
