//! One multicast group sharing a CU channel.

use super::{enumerate_vertices, is_feasible, ChannelModel};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::gains::GainTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOutcome {
    pub p_c: f64,
    pub p_g: f64,
    /// False when no power pair meets both SINR thresholds; the group is
    /// then silenced and the CU keeps full power.
    pub feasible: bool,
    /// Sum rate at the returned point, bits/s.
    pub objective: f64,
}

/// Best feasible vertex of the 2-D power region. Every candidate has the CU
/// or the group at full power: the region's remaining vertices (all SINR
/// constraints tight) can be scaled up without leaving it.
pub fn pair_power(k: usize, g: usize, gains: &GainTable, config: &ScenarioConfig) -> Result<PairOutcome> {
    pair_power_model(&ChannelModel::new(k, &[g], gains, config))
}

pub fn pair_power_model(model: &ChannelModel) -> Result<PairOutcome> {
    debug_assert_eq!(model.dim(), 2);
    let constraints = model.constraints();
    let mut best: Option<(f64, [f64; 2])> = None;
    for v in enumerate_vertices(&constraints, &model.p_max) {
        if !is_feasible(&constraints, &model.p_max, &v.powers) {
            continue;
        }
        let p = [v.powers[0].min(model.p_max[0]), v.powers[1].min(model.p_max[1])];
        let f = model.sum_rate(&p)?;
        if best.is_none_or(|(b, _)| f > b) {
            best = Some((f, p));
        }
    }
    Ok(match best {
        Some((objective, [p_c, p_g])) => PairOutcome {
            p_c,
            p_g,
            feasible: true,
            objective,
        },
        None => {
            let p = [model.p_max[0], 0.0];
            PairOutcome {
                p_c: p[0],
                p_g: 0.0,
                feasible: false,
                objective: model.sum_rate(&p)?,
            }
        }
    })
}
