//! Two multicast groups sharing a CU channel: search the vertices of the
//! 3-D power region `[p_c, p_g1, p_g2]`.
//!
//! Regions follow which powers are pinned at their maximum:
//! 1 `p_c`, 2 `p_g1`, 3 `p_g2` (two SINR planes active), 4 `p_c, p_g1`,
//! 5 `p_c, p_g2`, 6 `p_g1, p_g2` (one plane active), 7 all three.

use super::{enumerate_vertices, is_feasible, max_face_order, pair_power, ChannelModel, LinearConstraint};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::gains::GainTable;
use crate::metrics;

#[derive(Debug, Clone, PartialEq)]
pub struct CornerCandidate {
    pub region_id: u8,
    pub powers: [f64; 3],
    /// Indices of the constraints held with equality.
    pub active: Vec<usize>,
    pub feasible: bool,
    /// Sum rate for feasible candidates, `-inf` otherwise.
    pub objective: f64,
}

/// All vertex candidates in region order. `objective` is only called on
/// feasible points.
pub fn region_candidates(
    constraints: &[LinearConstraint],
    p_max: [f64; 3],
    mut objective: impl FnMut(&[f64; 3]) -> f64,
) -> Vec<CornerCandidate> {
    let faces = max_face_order(3);
    enumerate_vertices(constraints, &p_max)
        .into_iter()
        .map(|v| {
            let region_id = faces.iter().position(|f| *f == v.at_max).unwrap() as u8 + 1;
            let feasible = is_feasible(constraints, &p_max, &v.powers);
            let mut powers = [v.powers[0], v.powers[1], v.powers[2]];
            let objective = if feasible {
                for (x, m) in powers.iter_mut().zip(p_max) {
                    *x = x.min(m);
                }
                objective(&powers)
            } else {
                f64::NEG_INFINITY
            };
            CornerCandidate {
                region_id,
                powers,
                active: v.active,
                feasible,
                objective,
            }
        })
        .collect()
}

/// Highest objective among feasible candidates; the earliest (lowest
/// region) wins ties.
pub fn best_candidate(candidates: &[CornerCandidate]) -> Option<&CornerCandidate> {
    candidates
        .iter()
        .filter(|c| c.feasible)
        .fold(None, |best: Option<&CornerCandidate>, c| match best {
            Some(b) if b.objective >= c.objective => Some(b),
            _ => Some(c),
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerOutcome {
    /// `[p_c, p_g1, p_g2]` in watts.
    pub powers: [f64; 3],
    /// Region of the winning vertex; `None` when the fallback was used.
    pub region_id: Option<u8>,
    pub objective: f64,
    /// Groups silenced because no vertex was feasible.
    pub dropped: Vec<usize>,
}

pub fn corner_search_gk2(
    k: usize,
    g1: usize,
    g2: usize,
    gains: &GainTable,
    config: &ScenarioConfig,
) -> Result<CornerOutcome> {
    let model = ChannelModel::new(k, &[g1, g2], gains, config);
    let constraints = model.constraints();
    let p_max = [model.p_max[0], model.p_max[1], model.p_max[2]];
    let mut err = None;
    let candidates = region_candidates(&constraints, p_max, |p| {
        model.sum_rate(p).unwrap_or_else(|e| {
            err = Some(e);
            f64::NEG_INFINITY
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    if let Some(best) = best_candidate(&candidates) {
        return Ok(CornerOutcome {
            powers: best.powers,
            region_id: Some(best.region_id),
            objective: best.objective,
            dropped: Vec::new(),
        });
    }
    fallback(k, g1, g2, gains, config)
}

/// Silence the group with the smaller stand-alone throughput gain and solve
/// the remaining pair; silence both if that is infeasible too.
fn fallback(
    k: usize,
    g1: usize,
    g2: usize,
    gains: &GainTable,
    config: &ScenarioConfig,
) -> Result<CornerOutcome> {
    let radio = config.radio();
    let mut mg = vec![0.0; gains.num_groups()];
    mg[g1] = config.p_g_max_w();
    mg[g2] = config.p_g_max_w();
    let gain = |g: usize| {
        metrics::throughput_gain_for(k, &[g], &mg, config.p_c_max_w(), gains, &radio).map(|d| d.total)
    };
    let (keep, drop) = if gain(g1)? >= gain(g2)? { (g1, g2) } else { (g2, g1) };
    let pair = pair_power(k, keep, gains, config)?;
    let mut powers = [pair.p_c, 0.0, 0.0];
    let mut dropped = vec![drop];
    if pair.feasible {
        powers[if keep == g1 { 1 } else { 2 }] = pair.p_g;
    } else {
        dropped.push(keep);
        dropped.sort_unstable();
    }
    let model = ChannelModel::new(k, &[g1, g2], gains, config);
    Ok(CornerOutcome {
        powers,
        region_id: None,
        objective: model.sum_rate(&powers)?,
        dropped,
    })
}
