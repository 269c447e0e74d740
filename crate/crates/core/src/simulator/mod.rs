//! Unit-level simulation of placement, coded delivery and decoding.

mod coloring;
mod decode;
mod delivery;
mod realization;

pub use coloring::{coloring_check, ConflictGraph, Node};
pub use decode::decode;
pub use delivery::{deliver_hcd, deliver_zero_pad, Component, DeliveryTranscript, Message, Segment};
pub use realization::{file_units, min_integral_f, quantize, unit_value, CacheEntry, PlacementRealization};

use serde::Serialize;

use crate::error::Result;
use crate::exec::{map_ordered, Execution};
use crate::partition::DemandVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeliveryMode {
    #[default]
    ZeroPad,
    Hcd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    /// 1-based requested files.
    pub demand: Vec<usize>,
    pub per_s_totals: Vec<u64>,
    pub total_units: u64,
    pub load: f64,
    pub decoded: bool,
    pub coloring_proper: bool,
}

pub fn deliver(real: &PlacementRealization, d: &DemandVector, mode: DeliveryMode) -> Result<DeliveryTranscript> {
    match mode {
        DeliveryMode::ZeroPad => deliver_zero_pad(real, d),
        DeliveryMode::Hcd => deliver_hcd(real, d),
    }
}

pub fn simulate_one(real: &PlacementRealization, d: &DemandVector, mode: DeliveryMode) -> Result<SimulationSummary> {
    let t = deliver(real, d, mode)?;
    Ok(SimulationSummary {
        demand: d.one_based(),
        per_s_totals: t.per_s_totals(real.users()),
        total_units: t.total_units,
        load: t.total_units as f64 / real.f() as f64,
        decoded: decode(real, &t, d),
        coloring_proper: coloring_check(real, d),
    })
}

/// Simulate each demand independently; output order follows `demands`.
pub fn simulate(
    real: &PlacementRealization,
    demands: &[DemandVector],
    mode: DeliveryMode,
    exec: Execution,
) -> Result<Vec<SimulationSummary>> {
    map_ordered(exec, demands, |d| simulate_one(real, d, mode)).into_iter().collect()
}
