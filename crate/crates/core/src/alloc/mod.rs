//! Channel allocation: which multicast groups share which CU channel.

pub mod baseline;
pub mod ia;
pub mod oa;

use std::fmt;
use std::str::FromStr;

pub use baseline::{bipartite_allocate, bipartite_weights, greedy_allocate, random_allocate};
pub use ia::{ia_allocate, single_group_gains};
pub use oa::{oa_allocate, FixedOutage, OutageModel, PoissonOutage};

use crate::config::{OutageObjective, ScenarioConfig};
use crate::error::{Error, Result};
use crate::gains::GainTable;
use crate::metrics::Assignment;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    InterferenceAware,
    OutageAware(OutageObjective),
    Random,
    Bipartite,
    Greedy,
}

impl Policy {
    pub const ALL: [Policy; 7] = [
        Policy::InterferenceAware,
        Policy::OutageAware(OutageObjective::PriorityGroup),
        Policy::OutageAware(OutageObjective::MinMax),
        Policy::OutageAware(OutageObjective::MinSum),
        Policy::Random,
        Policy::Bipartite,
        Policy::Greedy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Policy::InterferenceAware => "interference_aware",
            Policy::OutageAware(OutageObjective::PriorityGroup) => "outage_aware_obj1",
            Policy::OutageAware(OutageObjective::MinMax) => "outage_aware_obj2",
            Policy::OutageAware(OutageObjective::MinSum) => "outage_aware_obj3",
            Policy::Random => "random",
            Policy::Bipartite => "bipartite",
            Policy::Greedy => "greedy",
        }
    }

    /// Random and greedy run every node at full power; the others go
    /// through per-channel power allocation.
    pub fn uses_max_power(&self) -> bool {
        matches!(self, Policy::Random | Policy::Greedy)
    }

    /// Parses a policy name; `outage_aware` alone takes its objective from
    /// `config`.
    pub fn parse_with(s: &str, config: &ScenarioConfig) -> Result<Policy> {
        match s.trim() {
            "outage_aware" | "oa" | "oa-stim" => Ok(Policy::OutageAware(config.outage_objective)),
            other => other.parse(),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p = match s.trim() {
            "interference_aware" | "ia" | "ia-stim" => Policy::InterferenceAware,
            "outage_aware_obj1" | "oa1" => Policy::OutageAware(OutageObjective::PriorityGroup),
            "outage_aware_obj2" | "oa2" => Policy::OutageAware(OutageObjective::MinMax),
            "outage_aware_obj3" | "oa3" => Policy::OutageAware(OutageObjective::MinSum),
            "random" => Policy::Random,
            "bipartite" => Policy::Bipartite,
            "greedy" => Policy::Greedy,
            other => return Err(Error::Config(format!("unknown policy `{other}`"))),
        };
        Ok(p)
    }
}

/// Runs the allocator for `policy`. `seed` only matters for the random
/// baseline.
pub fn allocate(
    policy: Policy,
    topology: &Topology,
    gains: &GainTable,
    config: &ScenarioConfig,
    seed: u64,
) -> Result<Assignment> {
    match policy {
        Policy::InterferenceAware => ia_allocate(gains, config),
        Policy::OutageAware(objective) => {
            let model = PoissonOutage::new(topology, config)?;
            oa_allocate(&model, gains, config, objective)
        }
        Policy::Random => Ok(random_allocate(gains.num_channels(), gains.num_groups(), seed)),
        Policy::Bipartite => bipartite_allocate(gains, config),
        Policy::Greedy => Ok(greedy_allocate(gains)),
    }
}

/// Smallest ratio, over the receivers of `victim`, of the victim's own gain
/// to the gain from `interferer`'s transmitter on channel `k`.
pub fn min_gain_ratio(gains: &GainTable, interferer: usize, victim: usize, k: usize) -> f64 {
    (0..gains.num_receivers(victim))
        .map(|r| gains.own(victim, r, k) / gains.mg_rx(interferer, victim, r, k))
        .fold(f64::INFINITY, f64::min)
}

/// Both directions of the mutual-interference test between two groups.
pub fn passes_ratio_test(gains: &GainTable, a: usize, b: usize, k: usize, threshold: f64) -> bool {
    min_gain_ratio(gains, b, a, k) > threshold && min_gain_ratio(gains, a, b, k) > threshold
}
