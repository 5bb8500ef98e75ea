//! Baseline proposer election: publicly recomputable, stake-weighted
//! selection from the RANDAO mix two epochs back. Anyone holding the state
//! can run this, which is exactly the property the attacks exploit.

use crate::digest::{hash_tagged_parts, Digest};
use crate::fhe::{CostMeter, OpKind};
use crate::randao::SLOTS_PER_EPOCH;
use crate::validator::Registry;

/// Stake-weighted proposer for `slot`, drawn from the given selection mix
/// by rejection sampling: a uniformly drawn candidate is kept with
/// probability balance/max_balance, so acceptance is proportional to stake.
/// With uniform balances every draw is kept and this degrades to uniform
/// sampling.
pub fn select_proposer(
    registry: &Registry,
    selection_mix: &Digest,
    slot: u64,
    meter: &CostMeter,
) -> usize {
    let seed = hash_tagged_parts(
        "proposer-selection",
        &[selection_mix.as_bytes(), &slot.to_be_bytes()],
    );
    meter.record(OpKind::Digest);
    let n = registry.len() as u64;
    let b_max = registry.max_effective_balance() as u128;
    for attempt in 0u64.. {
        let draw = hash_tagged_parts(
            "proposer-attempt",
            &[seed.as_bytes(), &attempt.to_be_bytes()],
        );
        meter.record(OpKind::Digest);
        let candidate = (draw.to_u64() % n) as usize;
        let r = u64::from_be_bytes(draw.as_bytes()[8..16].try_into().unwrap());
        let balance = registry.get(candidate).effective_balance as u128;
        if (r as u128) * b_max <= balance * (u64::MAX as u128) {
            return candidate;
        }
    }
    unreachable!("rejection sampling terminates: the max-balance validator is always accepted")
}

/// Full public schedule for one epoch under the baseline mechanism.
pub fn epoch_schedule(
    registry: &Registry,
    selection_mix: &Digest,
    epoch: u64,
    meter: &CostMeter,
) -> Vec<(u64, usize)> {
    (epoch * SLOTS_PER_EPOCH..(epoch + 1) * SLOTS_PER_EPOCH)
        .map(|slot| (slot, select_proposer(registry, selection_mix, slot, meter)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digest::hash_tagged;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn seed(i: usize) -> [u8; 32] {
        let mut s = [0u8; 32];
        s[..8].copy_from_slice(&(i as u64).to_be_bytes());
        s
    }

    fn mix(label: &str) -> Digest {
        hash_tagged("test-mix", label.as_bytes())
    }

    #[test]
    fn single_validator_is_always_selected() {
        let reg = Registry::new(1, &[], seed).unwrap();
        let meter = CostMeter::new();
        for slot in 0..100 {
            assert_eq!(select_proposer(&reg, &mix("m"), slot, &meter), 0);
        }
    }

    #[test]
    fn selection_is_deterministic_in_mix_and_slot() {
        let reg = Registry::new(50, &[], seed).unwrap();
        let meter = CostMeter::new();
        for slot in 0..64 {
            let a = select_proposer(&reg, &mix("m"), slot, &meter);
            let b = select_proposer(&reg, &mix("m"), slot, &meter);
            assert_eq!(a, b);
        }
        let same_slot_other_mix: Vec<usize> = (0..64)
            .map(|s| select_proposer(&reg, &mix("other"), s, &meter))
            .collect();
        let original: Vec<usize> = (0..64)
            .map(|s| select_proposer(&reg, &mix("m"), s, &meter))
            .collect();
        assert_ne!(original, same_slot_other_mix);
    }

    #[test]
    fn uniform_balances_pass_a_chi_square_uniformity_test() {
        let n = 100usize;
        let slots = 10_000u64;
        let reg = Registry::new(n, &[], seed).unwrap();
        let meter = CostMeter::new();
        let mut counts = vec![0u64; n];
        for slot in 0..slots {
            counts[select_proposer(&reg, &mix("uniform"), slot, &meter)] += 1;
        }
        let expected = slots as f64 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        let p = 1.0 - ChiSquared::new((n - 1) as f64).unwrap().cdf(chi2);
        assert!(p > 0.01, "chi-square {chi2:.1} gives p {p:.4}");
    }

    #[test]
    fn three_to_one_balances_select_in_ratio_within_three_sigma() {
        let reg = Registry::new(2, &[3, 1], seed).unwrap();
        let meter = CostMeter::new();
        let slots = 20_000u64;
        let heavy = (0..slots)
            .filter(|&s| select_proposer(&reg, &mix("ratio"), s, &meter) == 0)
            .count() as f64;
        let p = 0.75;
        let mean = slots as f64 * p;
        let sigma = (slots as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (heavy - mean).abs() <= 3.0 * sigma,
            "heavy validator won {heavy} of {slots}, expected {mean:.0} ± {:.0}",
            3.0 * sigma
        );
    }

    #[test]
    fn uniform_balances_cost_one_seed_and_one_draw_per_slot() {
        let reg = Registry::new(10, &[], seed).unwrap();
        let meter = CostMeter::new();
        let before = meter.snapshot();
        select_proposer(&reg, &mix("cost"), 0, &meter);
        let delta = meter.snapshot().delta_since(&before);
        assert_eq!(delta.digest, 2);
    }

    #[test]
    fn schedule_matches_per_slot_selection() {
        let reg = Registry::new(20, &[], seed).unwrap();
        let meter = CostMeter::new();
        let m = mix("sched");
        let schedule = epoch_schedule(&reg, &m, 3, &meter);
        assert_eq!(schedule.len(), SLOTS_PER_EPOCH as usize);
        for (slot, proposer) in schedule {
            assert_eq!(crate::randao::epoch_of_slot(slot), 3);
            assert_eq!(proposer, select_proposer(&reg, &m, slot, &meter));
        }
    }
}
