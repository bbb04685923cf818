//! Independent reference computations used to check the solvers: exhaustive
//! matching, power-grid searches, and a Poisson-field outage simulation.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::config::{ReceiversPerGroup, ScenarioConfig};
use crate::error::Result;
use crate::gains::{sample_gains, GainTable};
use crate::power::{is_feasible, ChannelModel};
use crate::rng::substream;
use crate::topology::generate_topology;

/// Best total weight over all injective channel-to-group maps, by
/// enumerating permutations of the zero-padded square matrix.
pub fn brute_force_matching(weights: &[Vec<f64>]) -> f64 {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    let w = |i: usize, j: usize| if i < rows && j < cols { weights[i][j] } else { 0.0 };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::NEG_INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let total: f64 = p.iter().enumerate().map(|(i, &j)| w(i, j)).sum();
        best = best.max(total);
    });
    if n == 0 { 0.0 } else { best }
}

fn permute(p: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, visit);
        p.swap(start, i);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridBest {
    pub powers: Vec<f64>,
    pub objective: f64,
    /// Largest objective change between the best point and its axis
    /// neighbours on the grid (feasible or not).
    pub cell_slack: f64,
}

/// Exhaustive search over `points` evenly spaced values `0..=p_max` per
/// power. `None` if no grid point is feasible.
pub fn grid_search(model: &ChannelModel, points: usize) -> Result<Option<GridBest>> {
    let d = model.dim();
    let constraints = model.constraints();
    let step: Vec<f64> = model.p_max.iter().map(|m| m / (points - 1) as f64).collect();
    let mut idx = vec![0usize; d];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut p = vec![0.0; d];
    loop {
        for i in 0..d {
            p[i] = step[i] * idx[i] as f64;
        }
        if is_feasible(&constraints, &model.p_max, &p) {
            let f = model.sum_rate(&p)?;
            if best.as_ref().is_none_or(|(b, _)| f > *b) {
                best = Some((f, idx.clone()));
            }
        }
        let mut i = 0;
        while i < d {
            idx[i] += 1;
            if idx[i] < points {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    let Some((objective, at)) = best else {
        return Ok(None);
    };
    let point = |ix: &[usize]| -> Vec<f64> { ix.iter().zip(&step).map(|(&i, s)| s * i as f64).collect() };
    let powers = point(&at);
    let mut cell_slack: f64 = 0.0;
    for i in 0..d {
        for delta in [-1isize, 1] {
            let j = at[i] as isize + delta;
            if j < 0 || j >= points as isize {
                continue;
            }
            let mut n = at.clone();
            n[i] = j as usize;
            let f = model.sum_rate(&point(&n))?;
            cell_slack = cell_slack.max((f - objective).abs());
        }
    }
    Ok(Some(GridBest {
        powers,
        objective,
        cell_slack,
    }))
}

/// Gains for one CU channel shared by `groups` groups, drawn from the
/// channel model at `config`'s settings.
pub fn random_channel_instance(config: &ScenarioConfig, groups: usize, seed: u64) -> Result<GainTable> {
    let cfg = ScenarioConfig {
        num_cus: 1,
        num_mgs: groups,
        ..config.clone()
    };
    let topo = generate_topology(&cfg, seed)?;
    sample_gains(&topo, &cfg, seed)
}

/// Single-receiver variant, for instances whose fixed points have a closed
/// form.
pub fn single_receiver_config(config: &ScenarioConfig) -> ScenarioConfig {
    ScenarioConfig {
        receivers_per_mg: ReceiversPerGroup::Uniform(1),
        ..config.clone()
    }
}

/// Parameters of the Poisson-field outage simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct PppSetup {
    pub alpha: f64,
    pub density_cu: f64,
    pub density_mg: f64,
    pub p_c: f64,
    pub p_g: f64,
    /// Interferers are dropped in a disc of this radius around the receiver.
    pub radius: f64,
    pub realizations: usize,
}

/// Monte Carlo estimate of `Pr(SIR <= gamma)` for a receiver at distance `d`
/// from its transmitter, with Rayleigh fading on every link and interferers
/// drawn from two Poisson processes. `out[i][j]` is for `distances[i]` and
/// `gammas[j]` (linear); each realization's interference field is shared
/// by all grid points.
pub fn ppp_outage(setup: &PppSetup, distances: &[f64], gammas: &[f64], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = substream(seed, &[0x5050_5000]);
    let area = std::f64::consts::PI * setup.radius * setup.radius;
    let fields = [(setup.density_cu, setup.p_c), (setup.density_mg, setup.p_g)];
    let counts: Vec<Poisson<f64>> = fields
        .iter()
        .map(|(l, _)| Poisson::new((l * area).max(f64::MIN_POSITIVE)).unwrap())
        .collect();
    let mut hits = vec![vec![0usize; gammas.len()]; distances.len()];
    for _ in 0..setup.realizations {
        let mut interference = 0.0;
        for ((density, power), count) in fields.iter().zip(&counts) {
            if *density <= 0.0 {
                continue;
            }
            let n = count.sample(&mut rng) as usize;
            for _ in 0..n {
                let r = setup.radius * rng.random::<f64>().sqrt();
                let h: f64 = Exp1.sample(&mut rng);
                interference += power * h * r.max(1e-9).powf(-setup.alpha);
            }
        }
        let h: f64 = Exp1.sample(&mut rng);
        for (i, &d) in distances.iter().enumerate() {
            let sir = setup.p_g * h * d.powf(-setup.alpha) / interference;
            for (j, &g) in gammas.iter().enumerate() {
                if sir <= g {
                    hits[i][j] += 1;
                }
            }
        }
    }
    hits.iter()
        .map(|row| row.iter().map(|&h| h as f64 / setup.realizations as f64).collect())
        .collect()
}
