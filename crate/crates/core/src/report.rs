//! Per-run reports, the per-slot activity log, and cross-seed aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SimulationConfig;
use crate::fhe::CostSnapshot;
use crate::state::SlotStatus;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// One slot as the chain (and any observer) saw it. Exactly one of
/// `validator` / `tracker` is set: the proposer's public index where the
/// mechanism announces one, otherwise the anonymous tracker handle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub slot: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validator: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tracker: Option<String>,
    pub status: SlotStatus,
    /// The adversary's hit list covered this slot's true proposer (whether
    /// or not the hit landed).
    pub attacked: bool,
    pub warm_up: bool,
    /// Total round-end shuffle bookkeeping ops charged to this slot.
    pub shuffle_end_ops: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCosts {
    pub block: CostSnapshot,
    pub epoch: CostSnapshot,
    pub shuffle_end: CostSnapshot,
}

/// Aggregate metrics over one span of slots (steady state, or everything
/// including warm-up).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub slots: u64,
    pub proposed_count: u64,
    pub missed_by_attack: u64,
    pub missed_idle: u64,
    pub missed_fraction: f64,
    pub attack_actions: u64,
    /// Distinct validators whose slot was suppressed at least once.
    pub unique_victims_suppressed: u64,
    /// Same, as a fraction of the validator set.
    pub affected_fraction: f64,
    /// Slots whose true proposer was in the censorship victim set
    /// (censorship modes only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim_proposal_slots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim_suppressed_slots: Option<u64>,
    /// Suppressed share of the victim set's proposal slots; absent when no
    /// victim proposed in the span.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim_suppression_rate: Option<f64>,
    pub cost: PhaseCosts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    /// Echo of the run's configuration; parsing it back yields an equal
    /// config.
    pub config: SimulationConfig,
    pub seed: u64,
    pub warm_up_slots: u64,
    /// One-time setup cost (registration, key material) before slot 0.
    pub genesis_cost: CostSnapshot,
    /// Warm-up excluded: the numbers the acceptance bands are about.
    pub steady: Aggregates,
    /// Every slot of the run, warm-up included.
    pub with_warm_up: Aggregates,
    pub slots: Vec<SlotRecord>,
}

impl RunReport {
    /// The canonical on-disk form; byte-identical for identical
    /// (config, seed).
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_json(text: &str) -> Result<RunReport, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn status_label(status: SlotStatus) -> &'static str {
    match status {
        SlotStatus::Proposed => "proposed",
        SlotStatus::MissedByAttack => "missed_by_attack",
        SlotStatus::MissedIdle => "missed_idle",
    }
}

/// Per-slot CSV with one row per slot, enough to redraw activity strips.
pub fn emit_chain_activity(report: &RunReport) -> String {
    let mut out = String::from("# chain-activity v1\nslot,status,attacked\n");
    for rec in &report.slots {
        out.push_str(&format!(
            "{},{},{}\n",
            rec.slot,
            status_label(rec.status),
            rec.attacked
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub stddev: f64,
}

fn stats(values: &[f64]) -> MetricStats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MetricStats {
        mean,
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        stddev: var.sqrt(),
    }
}

/// Cross-seed summary of one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub format_version: u32,
    pub config: SimulationConfig,
    pub seeds: Vec<u64>,
    pub metrics: BTreeMap<String, MetricStats>,
}

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("aggregation needs at least one report")]
    Empty,
    #[error("reports mix different configurations (seed {a} vs seed {b})")]
    MixedConfigs { a: u64, b: u64 },
    #[error("reports mix format versions {a} and {b}")]
    MixedVersions { a: u32, b: u32 },
}

/// Folds per-seed reports into mean/min/max/stddev per metric,
/// deterministically in seed order. All reports must share one config.
pub fn aggregate(reports: &[RunReport]) -> Result<AggregateSummary, AggregateError> {
    let first = reports.first().ok_or(AggregateError::Empty)?;
    for r in &reports[1..] {
        if r.config != first.config {
            return Err(AggregateError::MixedConfigs { a: first.seed, b: r.seed });
        }
        if r.format_version != first.format_version {
            return Err(AggregateError::MixedVersions {
                a: first.format_version,
                b: r.format_version,
            });
        }
    }
    let mut ordered: Vec<&RunReport> = reports.iter().collect();
    ordered.sort_by_key(|r| r.seed);

    let mut metrics = BTreeMap::new();
    let mut put = |name: &str, values: Vec<f64>| {
        metrics.insert(name.to_string(), stats(&values));
    };
    let steady = |f: fn(&Aggregates) -> f64| -> Vec<f64> {
        ordered.iter().map(|r| f(&r.steady)).collect()
    };
    put("missed_fraction", steady(|a| a.missed_fraction));
    put("proposed_count", steady(|a| a.proposed_count as f64));
    put("missed_by_attack", steady(|a| a.missed_by_attack as f64));
    put("missed_idle", steady(|a| a.missed_idle as f64));
    put("attack_actions", steady(|a| a.attack_actions as f64));
    put(
        "unique_victims_suppressed",
        steady(|a| a.unique_victims_suppressed as f64),
    );
    put("affected_fraction", steady(|a| a.affected_fraction));
    put("block_ops", steady(|a| a.cost.block.total() as f64));
    put("epoch_ops", steady(|a| a.cost.epoch.total() as f64));
    put("shuffle_end_ops", steady(|a| a.cost.shuffle_end.total() as f64));
    put(
        "missed_fraction_with_warm_up",
        ordered.iter().map(|r| r.with_warm_up.missed_fraction).collect(),
    );
    let rates: Vec<f64> = ordered
        .iter()
        .filter_map(|r| r.steady.victim_suppression_rate)
        .collect();
    if !rates.is_empty() {
        put("victim_suppression_rate", rates);
    }

    Ok(AggregateSummary {
        format_version: REPORT_FORMAT_VERSION,
        config: first.config.clone(),
        seeds: ordered.iter().map(|r| r.seed).collect(),
        metrics,
    })
}

impl AggregateSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# aggregate-summary v1\nmetric,mean,min,max,stddev\n");
        for (name, s) in &self.metrics {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                name, s.mean, s.min, s.max, s.stddev
            ));
        }
        out
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("summary serializes");
        bytes.push(b'\n');
        bytes
    }
}
