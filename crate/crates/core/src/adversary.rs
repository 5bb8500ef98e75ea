//! The attack model: a resource-bounded adversary that plans per-slot
//! denial-of-service or censorship actions from the public pre-slot view
//! alone.
//!
//! Knowledge is assigned once per run: each validator is independently
//! IP-linked with probability `p_link`, and a fixed fraction is protected
//! (hardened against a hit). An attack on a validator lands only when they
//! are linked and unprotected; both flags are ground truth the planner never
//! reads. Capacity bounds the number of distinct machines hit per slot.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::validator::{Registry, Validator};
use crate::view::AdversaryView;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    /// No adversary; every slot proceeds honestly.
    #[default]
    None,
    /// Hit whoever is about to propose, if the view names them; otherwise
    /// one uniform guess.
    TargetedDos,
    /// Saturate capacity with a fixed target set all run (or, against the
    /// shuffle election, the current owners of a fixed set of watched
    /// candidate positions).
    AdvancedDos,
    /// Suppress a fixed victim set, acting only when the view identifies a
    /// victim as the slot's proposer.
    Censorship,
    /// Suppress the victim set by keeping all of them under fire every slot.
    AdvancedCensorship,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AttackerConfig {
    pub mode: AttackMode,
    /// Probability a validator's on-chain identity maps to a reachable
    /// network endpoint.
    pub p_link: f64,
    /// Fraction of validators whose nodes absorb a hit.
    pub protected_fraction: f64,
    /// Per-slot attack capacity as a fraction of the validator count.
    pub capacity_fraction: f64,
    /// Fraction of validators the censorship modes try to silence.
    pub victim_fraction: f64,
}

impl Default for AttackerConfig {
    fn default() -> Self {
        AttackerConfig {
            mode: AttackMode::None,
            p_link: 0.0,
            protected_fraction: 0.0,
            capacity_fraction: 1.0,
            victim_fraction: 0.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AttackerConfigError {
    #[error("attacker.{field} must be in [0, 1], got {value}")]
    FractionOutOfRange { field: &'static str, value: f64 },
    #[error("attacker.capacity_fraction rounds to zero machines for {validators} validators")]
    ZeroCapacity { validators: usize },
    #[error("attacker.victim_fraction rounds to zero validators under a censorship mode")]
    NoVictims,
    #[error("victim set of {victims} exceeds the per-slot capacity of {capacity}")]
    VictimsExceedCapacity { victims: usize, capacity: usize },
}

fn count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).round() as usize
}

impl AttackerConfig {
    pub fn capacity_count(&self, validators: usize) -> usize {
        count(self.capacity_fraction, validators)
    }

    pub fn protected_count(&self, validators: usize) -> usize {
        count(self.protected_fraction, validators)
    }

    pub fn victim_count(&self, validators: usize) -> usize {
        count(self.victim_fraction, validators)
    }

    pub fn validate(&self, validators: usize) -> Result<(), AttackerConfigError> {
        let fractions = [
            ("p_link", self.p_link),
            ("protected_fraction", self.protected_fraction),
            ("capacity_fraction", self.capacity_fraction),
            ("victim_fraction", self.victim_fraction),
        ];
        for (field, value) in fractions {
            if !(0.0..=1.0).contains(&value) {
                return Err(AttackerConfigError::FractionOutOfRange { field, value });
            }
        }
        if self.mode == AttackMode::None {
            return Ok(());
        }
        let capacity = self.capacity_count(validators);
        if capacity == 0 {
            return Err(AttackerConfigError::ZeroCapacity { validators });
        }
        if matches!(self.mode, AttackMode::Censorship | AttackMode::AdvancedCensorship)
            && self.victim_count(validators) == 0
        {
            return Err(AttackerConfigError::NoVictims);
        }
        if self.mode == AttackMode::AdvancedCensorship {
            let victims = self.victim_count(validators);
            if victims > capacity {
                return Err(AttackerConfigError::VictimsExceedCapacity { victims, capacity });
            }
        }
        Ok(())
    }
}

/// Flags each validator with the adversary's run-long knowledge: linking is
/// an independent coin per validator, protection covers an exact count of
/// uniformly chosen validators. Call with a validated config; `gen_bool`
/// rejects probabilities outside [0, 1].
pub fn assign_knowledge<R: RngCore>(registry: &mut Registry, cfg: &AttackerConfig, rng: &mut R) {
    for i in 0..registry.len() {
        registry.get_mut(i).ip_linked = rng.gen_bool(cfg.p_link);
    }
    let protected = cfg.protected_count(registry.len());
    for i in rand::seq::index::sample(rng, registry.len(), protected) {
        registry.get_mut(i).protected = true;
    }
}

/// Whether a hit on this validator actually takes their node down.
pub fn dos_attempt(v: &Validator) -> bool {
    v.ip_linked && !v.protected
}

/// A hit list suppresses the slot iff it covers the true proposer and the
/// hit lands. Positional attacks on the shuffle election resolve through
/// [`AttackerState::watched_positions`] instead.
pub fn suppresses(targets: &[usize], proposer: usize, registry: &Registry) -> bool {
    targets.contains(&proposer) && dos_attempt(registry.get(proposer))
}

/// Per-run attacker: fixed choices drawn once up front, then a per-slot
/// planner that reads only the public view.
#[derive(Clone, Debug)]
pub struct AttackerState {
    cfg: AttackerConfig,
    validators: usize,
    /// Advanced denial of service without a candidate list: the machines
    /// kept under fire all run.
    fixed_targets: Vec<usize>,
    /// Advanced denial of service against the shuffle election: candidate
    /// positions whose owners-of-record get hit each round.
    watched_positions: Vec<usize>,
    /// Censorship victim set.
    victims: Vec<usize>,
    /// Selection-time owner maps captured from the view, by selection event.
    captures: BTreeMap<u64, Vec<usize>>,
    /// Total validators targeted, summed over slots.
    pub actions: u64,
}

impl AttackerState {
    /// Draws the run's fixed choices. `whisk_candidates` is the public
    /// candidate-list size when the chain runs the shuffle election.
    pub fn new<R: RngCore>(
        cfg: AttackerConfig,
        validators: usize,
        whisk_candidates: Option<usize>,
        rng: &mut R,
    ) -> AttackerState {
        let mut victims = Vec::new();
        if matches!(cfg.mode, AttackMode::Censorship | AttackMode::AdvancedCensorship) {
            victims = rand::seq::index::sample(rng, validators, cfg.victim_count(validators))
                .into_vec();
            victims.sort_unstable();
        }
        let mut fixed_targets = Vec::new();
        let mut watched_positions = Vec::new();
        if cfg.mode == AttackMode::AdvancedDos {
            let capacity = cfg.capacity_count(validators);
            match whisk_candidates {
                None => {
                    fixed_targets =
                        rand::seq::index::sample(rng, validators, capacity.min(validators))
                            .into_vec();
                    fixed_targets.sort_unstable();
                }
                Some(c) => {
                    watched_positions =
                        rand::seq::index::sample(rng, c, capacity.min(c)).into_vec();
                    watched_positions.sort_unstable();
                }
            }
        }
        AttackerState {
            cfg,
            validators,
            fixed_targets,
            watched_positions,
            victims,
            captures: BTreeMap::new(),
            actions: 0,
        }
    }

    pub fn victims(&self) -> &[usize] {
        &self.victims
    }

    pub fn watched_positions(&self) -> &[usize] {
        &self.watched_positions
    }

    /// Records public selection events. Candidate lists are captured the
    /// first time their selection event shows up in the view, which is
    /// before any shuffle of theirs lands, so the owner map is complete.
    pub fn observe(&mut self, view: &AdversaryView) {
        if let Some(w) = &view.whisk {
            self.captures.entry(w.shuffling_cohort_id).or_insert_with(|| {
                w.candidate_owner_by_position
                    .iter()
                    .map(|o| o.expect("freshly drawn lists are fully linked"))
                    .collect()
            });
        }
    }

    /// Owners of the watched positions in the list serving the viewed slot,
    /// deduplicated. Empty when the slot has no frozen list yet.
    fn watched_owners(&self, view: &AdversaryView) -> Vec<usize> {
        let Some(serving) = view.whisk.as_ref().and_then(|w| w.serving_cohort_id) else {
            return Vec::new();
        };
        let owners = &self.captures[&serving];
        let unique: BTreeSet<usize> =
            self.watched_positions.iter().map(|&p| owners[p]).collect();
        unique.into_iter().collect()
    }

    /// Picks this slot's hit list from the public view. Never exceeds
    /// capacity.
    pub fn plan<R: RngCore>(&mut self, view: &AdversaryView, rng: &mut R) -> Vec<usize> {
        self.observe(view);
        let targets = match self.cfg.mode {
            AttackMode::None => Vec::new(),
            AttackMode::TargetedDos => match view.scheduled_proposer {
                Some(p) => vec![p],
                None => vec![rng.gen_range(0..view.validator_count)],
            },
            AttackMode::AdvancedDos => {
                if view.whisk.is_some() {
                    self.watched_owners(view)
                } else {
                    self.fixed_targets.clone()
                }
            }
            AttackMode::Censorship => match view.scheduled_proposer {
                Some(p) if self.victims.binary_search(&p).is_ok() => vec![p],
                _ => Vec::new(),
            },
            AttackMode::AdvancedCensorship => self.victims.clone(),
        };
        assert!(
            targets.len() <= self.cfg.capacity_count(self.validators),
            "plan exceeded attack capacity"
        );
        self.actions += targets.len() as u64;
        targets
    }
}
