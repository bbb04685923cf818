//! Outage-aware allocation: groups join channels on which their outage
//! probability stays below the threshold, choosing among those channels by
//! one of three outage objectives, subject to the CU's interference budget.

use crate::config::{OutageObjective, ScenarioConfig};
use crate::error::Result;
use crate::gains::GainTable;
use crate::metrics::{outage_chi, Assignment};
use crate::power::stim::interference_threshold;
use crate::topology::Topology;

/// Outage probability of group `g` on channel `k` while the groups in
/// `cochannel` share it (entries equal to `g` are ignored).
pub trait OutageModel {
    fn outage(&self, g: usize, k: usize, cochannel: &[usize]) -> f64;
}

/// Hand-set outage values `p[g][k]`, independent of co-channel groups.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedOutage(pub Vec<Vec<f64>>);

impl OutageModel for FixedOutage {
    fn outage(&self, g: usize, k: usize, _cochannel: &[usize]) -> f64 {
        self.0[g][k]
    }
}

/// Per receiver, the closed-form Poisson-field outage at its distance from
/// the transmitter, times the Rayleigh success factor
/// `1 / (1 + gamma (p_i / p_g) (d / d_i)^alpha)` for each known interferer:
/// the CU of the channel and the co-channel transmitters (or only the
/// strongest of them). A group's outage is its worst receiver's.
#[derive(Debug, Clone)]
pub struct PoissonOutage<'a> {
    topology: &'a Topology,
    alpha: f64,
    gamma: f64,
    chi: f64,
    p_c: f64,
    p_g: f64,
    density_cu: f64,
    density_mg: f64,
    dominant_only: bool,
}

const MIN_DISTANCE: f64 = 1.0;

impl<'a> PoissonOutage<'a> {
    pub fn new(topology: &'a Topology, config: &ScenarioConfig) -> Result<Self> {
        Ok(PoissonOutage {
            topology,
            alpha: config.pathloss_exponent,
            gamma: config.outage_target_linear(),
            chi: outage_chi(config.pathloss_exponent)?,
            p_c: config.p_c_max_w(),
            p_g: config.p_g_max_w(),
            density_cu: config.density_cu,
            density_mg: config.density_mg,
            dominant_only: config.dominant_interferer_only,
        })
    }

    fn receiver_outage(&self, g: usize, r: usize, k: usize, cochannel: &[usize]) -> f64 {
        let t = self.topology;
        let rx = t.receivers[g][r];
        let d = t.mgtx[g].distance(&rx).max(MIN_DISTANCE);
        let delta = 2.0 / self.alpha;
        let field = self.chi
            * self.gamma.powf(delta)
            * d
            * d
            * (self.density_cu * (self.p_c / self.p_g).powf(delta) + self.density_mg);
        // (d / d_i)^alpha scaled by the power ratio
        let term = |p: f64, at: f64| self.gamma * (p / self.p_g) * (d / at.max(MIN_DISTANCE)).powf(self.alpha);
        let mut success = (-field).exp() / (1.0 + term(self.p_c, t.cus[k].distance(&rx)));
        let mg_terms = cochannel
            .iter()
            .filter(|&&j| j != g)
            .map(|&j| term(self.p_g, t.mgtx[j].distance(&rx)));
        if self.dominant_only {
            if let Some(x) = mg_terms.fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x)))) {
                success /= 1.0 + x;
            }
        } else {
            for x in mg_terms {
                success /= 1.0 + x;
            }
        }
        1.0 - success
    }
}

impl OutageModel for PoissonOutage<'_> {
    fn outage(&self, g: usize, k: usize, cochannel: &[usize]) -> f64 {
        (0..self.topology.receivers[g].len())
            .map(|r| self.receiver_outage(g, r, k, cochannel))
            .fold(0.0, f64::max)
    }
}

/// Outages of every group in `set` on channel `k`.
fn outages(model: &dyn OutageModel, k: usize, set: &[usize]) -> Vec<f64> {
    set.iter().map(|&h| model.outage(h, k, set)).collect()
}

/// Groups are taken in ascending order of their best stand-alone outage.
/// A group's candidate channels are those where its stand-alone outage is
/// below `outage_prob_threshold`; a channel is admissible if, with the
/// group added, every group on it stays below the threshold and the summed
/// full-power interference at the BS stays within the CU's budget. The
/// group joins the admissible channel minimising `objective` (ties to the
/// lower channel index) or stays unassigned.
pub fn oa_allocate(
    model: &dyn OutageModel,
    gains: &GainTable,
    config: &ScenarioConfig,
    objective: OutageObjective,
) -> Result<Assignment> {
    let (c, n) = (gains.num_channels(), gains.num_groups());
    let theta = config.outage_prob_threshold;
    let p_g = config.p_g_max_w();
    let alone: Vec<Vec<f64>> = (0..n)
        .map(|g| (0..c).map(|k| model.outage(g, k, &[])).collect())
        .collect();
    let budget: Vec<f64> = (0..c).map(|k| interference_threshold(k, gains, config)).collect();

    let mut order: Vec<usize> = (0..n).collect();
    let best_alone = |g: usize| alone[g].iter().copied().fold(f64::INFINITY, f64::min);
    order.sort_by(|&a, &b| best_alone(a).total_cmp(&best_alone(b)).then(a.cmp(&b)));

    let mut a = Assignment::new(c, n);
    for g in order {
        let mut choice: Option<(usize, (f64, f64))> = None;
        for k in 0..c {
            if !(alone[g][k] < theta) {
                continue;
            }
            let before = a.groups_on(k);
            let mut after = before.clone();
            after.push(g);
            after.sort_unstable();
            let interference: f64 = after.iter().map(|&h| p_g * gains.mg_bs(h, k)).sum();
            if interference > budget[k] {
                continue;
            }
            let out = outages(model, k, &after);
            if out.iter().any(|&p| !(p < theta)) {
                continue;
            }
            let own = out[after.iter().position(|&h| h == g).unwrap()];
            let score = match objective {
                OutageObjective::PriorityGroup => {
                    let j = config.priority_group;
                    let primary = after.iter().position(|&h| h == j).map_or(0.0, |i| out[i]);
                    (primary, own)
                }
                OutageObjective::MinMax => (out.iter().copied().fold(0.0, f64::max), own),
                OutageObjective::MinSum => {
                    let old: f64 = outages(model, k, &before).iter().sum();
                    (out.iter().sum::<f64>() - old, own)
                }
            };
            if choice.is_none_or(|(_, s)| score.0 < s.0 || (score.0 == s.0 && score.1 < s.1)) {
                choice = Some((k, score));
            }
        }
        if let Some((k, _)) = choice {
            a.assign(g, k);
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::outage_probability;
    use crate::topology::Point;

    /// Gains that never bind the interference budget.
    fn quiet(c: usize, g: usize) -> GainTable {
        let mut t = GainTable::zeros(c, &vec![1; g]);
        for k in 0..c {
            t.set_cu_bs(k, 1e-9);
        }
        t
    }

    #[test]
    fn single_channel_takes_every_admissible_group() {
        let m = FixedOutage(vec![vec![0.05], vec![0.2], vec![0.01]]);
        let cfg = ScenarioConfig::default();
        for obj in [OutageObjective::PriorityGroup, OutageObjective::MinMax, OutageObjective::MinSum] {
            let a = oa_allocate(&m, &quiet(1, 3), &cfg, obj).unwrap();
            assert_eq!(a.groups_on(0), vec![0, 2]);
            assert_eq!(a.unassigned(), vec![1]);
        }
    }

    #[test]
    fn min_max_matches_brute_force() {
        let cfg = ScenarioConfig::default();
        let cases = [
            vec![vec![0.05, 0.08], vec![0.01, 0.06]],
            vec![vec![0.02, 0.09], vec![0.07, 0.03]],
            vec![vec![0.04, 0.04], vec![0.06, 0.01]],
        ];
        for p in cases {
            let a = oa_allocate(&FixedOutage(p.clone()), &quiet(2, 2), &cfg, OutageObjective::MinMax).unwrap();
            let got = (0..2).map(|g| p[g][a.channel_of(g).unwrap()]).fold(0.0, f64::max);
            let mut brute = f64::INFINITY;
            for k0 in 0..2 {
                for k1 in 0..2 {
                    brute = brute.min(p[0][k0].max(p[1][k1]));
                }
            }
            assert_eq!(got, brute);
        }
    }

    #[test]
    fn priority_group_keeps_its_channel_clear() {
        let cfg = ScenarioConfig::default();
        // Group 1 would rather use channel 0, but group 0 (priority) is there.
        struct Shared;
        impl OutageModel for Shared {
            fn outage(&self, g: usize, k: usize, co: &[usize]) -> f64 {
                let base = [[0.01, 0.03], [0.02, 0.04]][g][k];
                base + 0.01 * co.iter().filter(|&&j| j != g).count() as f64
            }
        }
        let a = oa_allocate(&Shared, &quiet(2, 2), &cfg, OutageObjective::PriorityGroup).unwrap();
        assert_eq!(a.channel_of(0), Some(0));
        assert_eq!(a.channel_of(1), Some(1));
        let b = oa_allocate(&Shared, &quiet(2, 2), &cfg, OutageObjective::MinMax).unwrap();
        assert_eq!(b.channel_of(1), Some(0));
    }

    #[test]
    fn interference_budget_blocks_admission() {
        let cfg = ScenarioConfig::default();
        let mut t = quiet(1, 2);
        // budget ~ 1e-9 / 3.16; each group alone fits, both do not
        t.set_mg_bs(0, 0, 2e-10);
        t.set_mg_bs(1, 0, 2e-10);
        let m = FixedOutage(vec![vec![0.01], vec![0.02]]);
        let a = oa_allocate(&m, &t, &cfg, OutageObjective::MinSum).unwrap();
        assert_eq!(a.groups_on(0), vec![0]);
    }

    fn one_receiver_topology(d: f64, cu_at: f64) -> Topology {
        Topology {
            cell_radius: 500.0,
            bs: Point::ORIGIN,
            cus: vec![Point::new(cu_at, 0.0)],
            mgtx: vec![Point::new(0.0, 0.0), Point::new(0.0, 300.0)],
            receivers: vec![vec![Point::new(d, 0.0)], vec![Point::new(0.0, 300.0 + d)]],
        }
    }

    #[test]
    fn poisson_model_reduces_to_the_closed_form() {
        let cfg = ScenarioConfig::default();
        let topo = one_receiver_topology(30.0, 1e9);
        let m = PoissonOutage::new(&topo, &cfg).unwrap();
        let closed = outage_probability(
            cfg.outage_target_linear(),
            cfg.pathloss_exponent,
            30.0,
            cfg.density_cu,
            cfg.density_mg,
            cfg.p_c_max_w(),
            cfg.p_g_max_w(),
        )
        .unwrap();
        // a CU far away contributes nothing
        assert!((m.outage(0, 0, &[]) - closed).abs() < 1e-12);
        // a co-channel transmitter can only add outage
        assert!(m.outage(0, 0, &[1]) > m.outage(0, 0, &[]));
    }

    #[test]
    fn dominant_only_is_no_worse() {
        let cfg = ScenarioConfig::default();
        let dom = ScenarioConfig {
            dominant_interferer_only: true,
            ..Default::default()
        };
        let topo = one_receiver_topology(30.0, 200.0);
        let full = PoissonOutage::new(&topo, &cfg).unwrap();
        let one = PoissonOutage::new(&topo, &dom).unwrap();
        assert!(one.outage(0, 0, &[1]) <= full.outage(0, 0, &[1]));
        assert_eq!(one.outage(0, 0, &[]), full.outage(0, 0, &[]));
    }
}
