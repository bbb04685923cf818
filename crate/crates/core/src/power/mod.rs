//! Transmit-power allocation for a fixed channel assignment.
//!
//! Channels carrying one group use [`pair_power`], two groups use
//! [`corner_search_gk2`], and three or more use the iterative STIM update
//! in [`stim`].

pub mod corner;
pub mod hungarian;
pub mod pair;
pub mod stim;

pub use corner::{corner_search_gk2, CornerCandidate, CornerOutcome};
pub use hungarian::{hungarian_match, Matching};
pub use pair::{pair_power, PairOutcome};
pub use stim::{stim_allocate, stim_channel, StimOutcome};

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::gains::GainTable;
use crate::metrics::{self, Assignment, PowerProfile, Radio};

/// Half-space `coef · p >= rhs` over the channel's power vector
/// `p = [p_c, p_g1, p_g2, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coef: Vec<f64>,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(coef: Vec<f64>, rhs: f64) -> Self {
        LinearConstraint { coef, rhs }
    }

    pub fn slack(&self, p: &[f64]) -> f64 {
        dot(&self.coef, p) - self.rhs
    }

    /// Magnitude the slack is compared against when judging feasibility.
    pub fn scale(&self, p: &[f64]) -> f64 {
        self.coef.iter().zip(p).map(|(c, x)| (c * x).abs()).sum::<f64>() + self.rhs.abs()
    }

    pub fn holds(&self, p: &[f64], rel_tol: f64) -> bool {
        self.slack(p) >= -rel_tol * self.scale(p)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative tolerance for constraint checks on computed vertices.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// True if `p` lies in `[0, p_max]` and satisfies every constraint.
pub fn is_feasible(constraints: &[LinearConstraint], p_max: &[f64], p: &[f64]) -> bool {
    p.iter()
        .zip(p_max)
        .all(|(&x, &m)| x.is_finite() && x >= 0.0 && x <= m * (1.0 + 1e-12))
        && constraints.iter().all(|c| c.holds(p, FEASIBILITY_TOL))
}

/// The CU on channel `k` together with the groups sharing it: builds the
/// SINR constraints and evaluates the sum rate for a power vector
/// `[p_c, p_g for each group in order]`.
#[derive(Debug, Clone)]
pub struct ChannelModel<'a> {
    pub k: usize,
    pub groups: Vec<usize>,
    pub gains: &'a GainTable,
    pub radio: Radio,
    pub gamma_cu: f64,
    pub gamma_mg: f64,
    pub p_max: Vec<f64>,
}

impl<'a> ChannelModel<'a> {
    pub fn new(k: usize, groups: &[usize], gains: &'a GainTable, config: &ScenarioConfig) -> Self {
        let mut p_max = vec![config.p_c_max_w()];
        p_max.extend(std::iter::repeat_n(config.p_g_max_w(), groups.len()));
        ChannelModel {
            k,
            groups: groups.to_vec(),
            gains,
            radio: config.radio(),
            gamma_cu: config.gamma_cu(),
            gamma_mg: config.gamma_mg(),
            p_max,
        }
    }

    pub fn dim(&self) -> usize {
        self.groups.len() + 1
    }

    /// One constraint for the CU, then one per receiver of each group.
    pub fn constraints(&self) -> Vec<LinearConstraint> {
        let (k, n0, g) = (self.k, self.radio.noise_w, &self.gains);
        let mut out = Vec::new();
        let mut cu = vec![g.cu_bs(k)];
        cu.extend(self.groups.iter().map(|&j| -self.gamma_cu * g.mg_bs(j, k)));
        out.push(LinearConstraint::new(cu, self.gamma_cu * n0));
        for (i, &gi) in self.groups.iter().enumerate() {
            for r in 0..g.num_receivers(gi) {
                let mut coef = vec![-self.gamma_mg * g.cu_rx(k, gi, r)];
                for (j, &gj) in self.groups.iter().enumerate() {
                    coef.push(if i == j {
                        g.own(gi, r, k)
                    } else {
                        -self.gamma_mg * g.mg_rx(gj, gi, r, k)
                    });
                }
                out.push(LinearConstraint::new(coef, self.gamma_mg * n0));
            }
        }
        out
    }

    fn mg_power(&self, p: &[f64]) -> Vec<f64> {
        let mut mg = vec![0.0; self.gains.num_groups()];
        for (i, &g) in self.groups.iter().enumerate() {
            mg[g] = p[i + 1];
        }
        mg
    }

    /// CU SINR followed by each group's worst-receiver SINR.
    pub fn sinrs(&self, p: &[f64]) -> Result<Vec<f64>> {
        let mg = self.mg_power(p);
        let i = metrics::bs_interference(self.k, &self.groups, &mg, self.gains);
        let mut out = vec![p[0] * self.gains.cu_bs(self.k) / (i + self.radio.noise_w)];
        for &g in &self.groups {
            out.push(metrics::group_sinr(
                g,
                self.k,
                &self.groups,
                &mg,
                p[0],
                self.gains,
                self.radio.noise_w,
            )?);
        }
        Ok(out)
    }

    /// CU rate plus every group's multicast rate, bits/s.
    pub fn sum_rate(&self, p: &[f64]) -> Result<f64> {
        Ok(self.sinrs(p)?.into_iter().map(|s| self.radio.rate(s)).sum())
    }
}

/// A vertex of `{p : constraints, p <= p_max}` candidate: the variables
/// pinned at their maximum and the constraints held with equality.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub at_max: Vec<usize>,
    pub active: Vec<usize>,
    pub powers: Vec<f64>,
}

/// Non-empty subsets of `0..d` ordered by size, then lexicographically.
pub fn max_face_order(d: usize) -> Vec<Vec<usize>> {
    let mut masks: Vec<Vec<usize>> = (1u32..(1 << d))
        .map(|m| (0..d).filter(|&i| m & (1 << i) != 0).collect())
        .collect();
    masks.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    masks
}

/// Every point where at least one variable sits at its maximum and the
/// remaining free variables are fixed by the same number of active
/// constraints. Singular systems are skipped. Points are not filtered for
/// feasibility.
pub fn enumerate_vertices(constraints: &[LinearConstraint], p_max: &[f64]) -> Vec<Vertex> {
    let d = p_max.len();
    let mut out = Vec::new();
    for at_max in max_face_order(d) {
        let free: Vec<usize> = (0..d).filter(|i| !at_max.contains(i)).collect();
        for active in combinations(constraints.len(), free.len()) {
            let a: Vec<Vec<f64>> = active
                .iter()
                .map(|&c| free.iter().map(|&j| constraints[c].coef[j]).collect())
                .collect();
            let b: Vec<f64> = active
                .iter()
                .map(|&c| {
                    constraints[c].rhs
                        - at_max
                            .iter()
                            .map(|&i| constraints[c].coef[i] * p_max[i])
                            .sum::<f64>()
                })
                .collect();
            let Some(x) = solve_linear(a, b) else {
                continue;
            };
            let mut powers = p_max.to_vec();
            for (j, v) in free.iter().zip(x) {
                powers[*j] = v;
            }
            out.push(Vertex {
                at_max: at_max.clone(),
                active,
                powers,
            });
        }
    }
    out
}

/// All `r`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// Gaussian elimination with partial pivoting; `None` for (near-)singular
/// systems.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let norm = a
        .iter()
        .flatten()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    if norm == 0.0 && n > 0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * norm {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Result of allocating powers over every channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerOutcome {
    pub powers: PowerProfile,
    /// Groups switched off because their channel had no feasible point.
    pub dropped: Vec<usize>,
    /// Channels whose STIM iteration hit the iteration limit.
    pub unconverged: Vec<usize>,
}

/// Every CU and assigned group at maximum power; unassigned groups silent.
pub fn max_powers(assignment: &Assignment, config: &ScenarioConfig) -> PowerProfile {
    let mut p = PowerProfile::uniform(
        assignment.num_channels(),
        assignment.num_groups(),
        config.p_c_max_w(),
        0.0,
    );
    for g in 0..assignment.num_groups() {
        if assignment.channel_of(g).is_some() {
            p.mg[g] = config.p_g_max_w();
        }
    }
    p
}

/// Per-channel dispatch on the number of sharing groups.
pub fn allocate_powers(
    assignment: &Assignment,
    gains: &GainTable,
    config: &ScenarioConfig,
) -> Result<PowerOutcome> {
    let c = assignment.num_channels();
    let mut powers = PowerProfile::uniform(c, assignment.num_groups(), config.p_c_max_w(), 0.0);
    let mut dropped = Vec::new();
    let mut unconverged = Vec::new();
    for k in 0..c {
        let groups = assignment.groups_on(k);
        match groups.len() {
            0 => {}
            1 => {
                let out = pair_power(k, groups[0], gains, config)?;
                powers.cu[k] = out.p_c;
                powers.mg[groups[0]] = out.p_g;
                if !out.feasible {
                    dropped.push(groups[0]);
                }
            }
            2 => {
                let out = corner_search_gk2(k, groups[0], groups[1], gains, config)?;
                powers.cu[k] = out.powers[0];
                powers.mg[groups[0]] = out.powers[1];
                powers.mg[groups[1]] = out.powers[2];
                dropped.extend(out.dropped);
            }
            _ => {
                let out = stim_channel(k, &groups, gains, config, false)?;
                powers.cu[k] = out.p_c;
                for (g, p) in groups.iter().zip(&out.mg) {
                    powers.mg[*g] = *p;
                }
                if !out.converged {
                    unconverged.push(k);
                }
            }
        }
    }
    dropped.sort_unstable();
    Ok(PowerOutcome {
        powers,
        dropped,
        unconverged,
    })
}
