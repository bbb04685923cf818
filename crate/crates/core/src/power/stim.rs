//! Iterative power control for any number of groups on a channel: each
//! group's power is capped by an equal share of the CU's interference
//! budget and scaled toward its SINR target.

use super::ChannelModel;
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::gains::GainTable;
use crate::metrics::{self, Assignment, PowerProfile};
use crate::units::dbm_to_watts;

/// Largest total MG power at the BS on channel `k`: the configured cap, or
/// the interference the CU tolerates at full power while keeping its
/// minimum rate. Never negative.
pub fn interference_threshold(k: usize, gains: &GainTable, config: &ScenarioConfig) -> f64 {
    let budget = config.interference_cap.unwrap_or_else(|| {
        metrics::interference_budget(
            k,
            config.p_c_max_w(),
            gains,
            &config.radio(),
            config.cu_min_rate(),
        )
    });
    budget.max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StimOutcome {
    pub p_c: f64,
    /// Powers in the order of the `groups` argument.
    pub mg: Vec<f64>,
    /// Per-group power caps.
    pub caps: Vec<f64>,
    /// Interference budget the caps split.
    pub budget: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Every iterate including the initial point, when requested.
    pub trace: Vec<Vec<f64>>,
}

/// Runs the update `p <- min(cap, (gamma / Gamma(p)) p)` for the groups on
/// channel `k`, evaluating SINRs with the CU at full power, then sets the CU
/// power from its minimum-rate requirement and the configured floor.
pub fn stim_channel(
    k: usize,
    groups: &[usize],
    gains: &GainTable,
    config: &ScenarioConfig,
    record: bool,
) -> Result<StimOutcome> {
    let n = groups.len();
    let p_g_max = config.p_g_max_w();
    let p_c_max = config.p_c_max_w();
    let budget = interference_threshold(k, gains, config);
    let caps: Vec<f64> = groups
        .iter()
        .map(|&g| {
            let h = gains.mg_bs(g, k);
            if h > 0.0 {
                p_g_max.min(budget / (h * n as f64))
            } else {
                p_g_max
            }
        })
        .collect();
    let mut p: Vec<f64> = caps.iter().map(|&c| (p_g_max / n as f64).min(c)).collect();
    let mut trace = Vec::new();
    if record {
        trace.push(p.clone());
    }

    let model = ChannelModel::new(k, groups, gains, config);
    let target = config.gamma_mg();
    let mut full = vec![p_c_max; n + 1];
    let mut converged = n == 0;
    let mut iterations = 0;
    while !converged && iterations < config.stim_max_iterations {
        full[1..].copy_from_slice(&p);
        let sinr = model.sinrs(&full)?;
        let next: Vec<f64> = p
            .iter()
            .zip(&caps)
            .zip(&sinr[1..])
            .map(|((&pg, &cap), &s)| {
                if s > 0.0 {
                    (target / s * pg).min(cap)
                } else if pg > 0.0 {
                    cap
                } else {
                    0.0
                }
            })
            .collect();
        let change = p
            .iter()
            .zip(&next)
            .map(|(a, b)| {
                let scale = a.abs().max(b.abs());
                if scale == 0.0 { 0.0 } else { (a - b).abs() / scale }
            })
            .fold(0.0, f64::max);
        p = next;
        iterations += 1;
        if record {
            trace.push(p.clone());
        }
        converged = change < config.stim_tolerance;
    }

    let mut mg = vec![0.0; gains.num_groups()];
    for (&g, &pg) in groups.iter().zip(&p) {
        mg[g] = pg;
    }
    let floor = config.cu_power_floor.map_or(p_c_max, dbm_to_watts);
    let needed = metrics::p_c_min_for(k, groups, &mg, gains, &config.radio(), config.cu_min_rate())?;
    let p_c = needed.max(floor).min(p_c_max);
    Ok(StimOutcome {
        p_c,
        mg: p,
        caps,
        budget,
        iterations,
        converged,
        trace,
    })
}

/// STIM on every channel of `assignment`. Returns the powers and the
/// channels that did not converge.
pub fn stim_allocate(
    assignment: &Assignment,
    gains: &GainTable,
    config: &ScenarioConfig,
) -> Result<(PowerProfile, Vec<usize>)> {
    let mut powers = PowerProfile::uniform(
        assignment.num_channels(),
        assignment.num_groups(),
        config.p_c_max_w(),
        0.0,
    );
    let mut unconverged = Vec::new();
    for k in 0..assignment.num_channels() {
        let groups = assignment.groups_on(k);
        if groups.is_empty() {
            continue;
        }
        let out = stim_channel(k, &groups, gains, config, false)?;
        powers.cu[k] = out.p_c;
        for (&g, &pg) in groups.iter().zip(&out.mg) {
            powers.mg[g] = pg;
        }
        if !out.converged {
            unconverged.push(k);
        }
    }
    Ok((powers, unconverged))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two single-receiver groups on one channel.
    fn table(own: [f64; 2], cross: [f64; 2], to_bs: [f64; 2], cu_rx: [f64; 2]) -> GainTable {
        let mut t = GainTable::zeros(1, &[1, 1]);
        t.set_cu_bs(0, 1e-9);
        for g in 0..2 {
            t.set_mg_rx(g, g, 0, 0, own[g]);
            t.set_mg_rx(1 - g, g, 0, 0, cross[g]);
            t.set_mg_bs(g, 0, to_bs[g]);
            t.set_cu_rx(0, g, 0, cu_rx[g]);
        }
        t
    }

    #[test]
    fn single_group_at_target_is_a_fixed_point() {
        let mut t = GainTable::zeros(1, &[1]);
        t.set_cu_bs(0, 1e-9);
        t.set_mg_bs(0, 0, 1e-12);
        t.set_cu_rx(0, 0, 0, 1e-12);
        let cfg = ScenarioConfig {
            interference_cap: Some(1e-12 * 0.5),
            ..Default::default()
        };
        // cap = 0.5 W; choose the own gain so SINR at the cap is exactly the target
        let interference = cfg.p_c_max_w() * 1e-12 + cfg.noise_w();
        t.set_mg_rx(0, 0, 0, 0, cfg.gamma_mg() * interference / 0.5);
        let out = stim_channel(0, &[0], &t, &cfg, true).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        assert!((out.mg[0] - 0.5).abs() < 1e-12);
        assert!((out.trace[1][0] - out.trace[0][0]).abs() < 1e-12);
    }

    #[test]
    fn symmetric_groups_get_equal_power() {
        let t = table([1e-7; 2], [1e-9; 2], [1e-12; 2], [1e-12; 2]);
        let out = stim_channel(0, &[0, 1], &t, &ScenarioConfig::default(), false).unwrap();
        assert!(out.converged);
        assert_eq!(out.mg[0], out.mg[1]);
    }

    #[test]
    fn converges_to_the_linear_fixed_point() {
        let own = [2e-7, 1e-7];
        let cross = [3e-9, 5e-9];
        let cu_rx = [1e-12, 2e-12];
        let t = table(own, cross, [1e-13; 2], cu_rx);
        let cfg = ScenarioConfig::default();
        let out = stim_channel(0, &[0, 1], &t, &cfg, true).unwrap();
        assert!(out.converged);
        // p_g = gamma (cross p_other + p_c h_cr + N0) / own, solved directly
        let g = cfg.gamma_mg();
        let c: Vec<f64> = (0..2).map(|i| g * (cfg.p_c_max_w() * cu_rx[i] + cfg.noise_w()) / own[i]).collect();
        let a = [g * cross[0] / own[0], g * cross[1] / own[1]];
        let det = 1.0 - a[0] * a[1];
        let p0 = (c[0] + a[0] * c[1]) / det;
        let p1 = (c[1] + a[1] * c[0]) / det;
        assert!((out.mg[0] / p0 - 1.0).abs() < 1e-6);
        assert!((out.mg[1] / p1 - 1.0).abs() < 1e-6);
        for it in &out.trace {
            assert!(it.iter().zip(&out.caps).all(|(p, c)| *p >= 0.0 && p <= c));
        }
    }

    #[test]
    fn caps_respect_the_budget() {
        let t = table([1e-9; 2], [1e-8; 2], [1e-9, 3e-9], [1e-12; 2]);
        let cfg = ScenarioConfig::default();
        let out = stim_channel(0, &[0, 1], &t, &cfg, true).unwrap();
        let i: f64 = out.mg[0] * 1e-9 + out.mg[1] * 3e-9;
        assert!(i <= out.budget * (1.0 + 1e-12));
        assert!(out.caps[0] < cfg.p_g_max_w());
    }

    #[test]
    fn iteration_limit_flags_unconverged() {
        let t = table([1e-7, 1e-7], [1e-9, 1e-9], [1e-12; 2], [1e-12; 2]);
        let cfg = ScenarioConfig {
            stim_max_iterations: 1,
            ..Default::default()
        };
        let out = stim_channel(0, &[0, 1], &t, &cfg, false).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn cu_power_uses_floor_or_minimum() {
        let t = table([1e-7; 2], [1e-9; 2], [1e-12; 2], [1e-12; 2]);
        let cfg = ScenarioConfig::default();
        assert_eq!(stim_channel(0, &[0, 1], &t, &cfg, false).unwrap().p_c, cfg.p_c_max_w());
        let low = ScenarioConfig {
            cu_power_floor: Some(-100.0),
            ..Default::default()
        };
        let out = stim_channel(0, &[0, 1], &t, &low, false).unwrap();
        assert!(out.p_c < low.p_c_max_w());
        let mut mg = vec![0.0; 2];
        mg.copy_from_slice(&out.mg);
        let need = metrics::p_c_min_for(0, &[0, 1], &mg, &t, &low.radio(), low.cu_min_rate()).unwrap();
        assert!((out.p_c - need).abs() <= 1e-12 * need.max(1e-30));
    }
}
