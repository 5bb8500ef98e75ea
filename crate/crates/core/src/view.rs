//! The observer boundary: what anyone watching the chain can read at the
//! start of a slot. Attack planners take an [`AdversaryView`] and nothing
//! else, so whatever is absent here is structurally out of their reach:
//! validator secrets, tracker scalars, sortition tickets, vouchers, and the
//! plaintext draw behind an encrypted election.

use serde::Serialize;

use crate::fhe::CostMeter;
use crate::group::GroupBackend;
use crate::state::{BeaconState, MechanismState};
use crate::statusquo::select_proposer;
use crate::whisk::WhiskState;

/// Public candidate-list facts for the shuffle-based election.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiskView {
    /// Selection-event counter of the list currently being shuffled.
    pub shuffling_cohort_id: u64,
    /// position -> owner for entries not yet re-randomized. The whole map
    /// is public the moment a list is drawn and degrades as shuffles land.
    pub candidate_owner_by_position: Vec<Option<usize>>,
    /// Selection event behind this slot's frozen proposer list, absent
    /// during warm-up.
    pub serving_cohort_id: Option<u64>,
}

/// Everything an observer (honest or otherwise) sees before a slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdversaryView {
    pub slot: u64,
    pub validator_count: usize,
    /// The slot's proposer where the mechanism announces it in advance:
    /// always for the baseline, during warm-up for the shuffle election,
    /// never for the encrypted election.
    pub scheduled_proposer: Option<usize>,
    pub whisk: Option<WhiskView>,
}

impl AdversaryView {
    /// Canonical byte form. Tests compare these across counterfactual
    /// secret assignments to show the view leaks nothing it shouldn't.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("view serializes")
    }
}

pub(crate) fn whisk_view<B: GroupBackend>(w: &WhiskState<B>, slot: u64) -> WhiskView {
    WhiskView {
        shuffling_cohort_id: w.shuffling_cohort_id(),
        candidate_owner_by_position: w.candidate_linkage(),
        serving_cohort_id: if w.is_warm_up_slot(slot) {
            None
        } else {
            w.frozen().map(|f| f.cohort_id())
        },
    }
}

/// Snapshots the public pre-slot facts. Recomputing the announced schedule
/// is observer-side work, so it meters into a scratch counter rather than
/// the protocol's.
pub fn observe<B: GroupBackend>(state: &BeaconState<B>) -> AdversaryView {
    let scratch = CostMeter::new();
    let mix = state.mixes.selection_mix(state.current_epoch());
    let (scheduled_proposer, whisk) = match &state.mechanism {
        MechanismState::StatusQuo => (
            Some(select_proposer(&state.registry, &mix, state.slot, &scratch)),
            None,
        ),
        MechanismState::Whisk(w) => {
            let scheduled = w
                .is_warm_up_slot(state.slot)
                .then(|| select_proposer(&state.registry, &mix, state.slot, &scratch));
            (scheduled, Some(whisk_view(w, state.slot)))
        }
        MechanismState::Sortition { .. } => (None, None),
    };
    AdversaryView {
        slot: state.slot,
        validator_count: state.registry.len(),
        scheduled_proposer,
        whisk,
    }
}
