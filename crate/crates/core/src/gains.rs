//! Per-channel linear power gains of every link in the cell.
//!
//! A link gain in dB is `-kappa - 10 alpha log10(d) - xi + 10 log10(F)` with
//! `xi ~ N(0, sigma^2)` shadowing drawn once per link and `F ~ Exp(1)` Rayleigh
//! power fading drawn once per link and channel. The dB to linear conversion
//! happens here and nowhere downstream.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::rng::{substream, tag};
use crate::topology::{Point, Topology};

/// Distances below this are clamped, in metres.
pub const MIN_DISTANCE: f64 = 1.0;

/// Endpoints of a link, used to key its random draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Bs,
    Cu(usize),
    Mgtx(usize),
    /// Receiver `r` of group `g`.
    Rx(usize, usize),
}

impl Node {
    fn labels(self) -> [u64; 3] {
        match self {
            Node::Bs => [tag::NODE_BS, 0, 0],
            Node::Cu(k) => [tag::NODE_CU, k as u64, 0],
            Node::Mgtx(g) => [tag::NODE_MGTX, g as u64, 0],
            Node::Rx(g, r) => [tag::NODE_RX, g as u64, r as u64],
        }
    }
}

/// Random terms of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDraws {
    pub shadowing_db: f64,
    /// Unit-mean exponential fading power per channel.
    pub fading: Vec<f64>,
}

/// Draws the shadowing and per-channel fading of link `tx -> rx`. The
/// draws are always made in the same order, and disabled terms are replaced
/// by their neutral values afterwards, so toggling them never shifts
/// another term.
pub fn link_draws(
    seed: u64,
    tx: Node,
    rx: Node,
    num_channels: usize,
    shadowing_std: f64,
    fading_enabled: bool,
) -> LinkDraws {
    let t = tx.labels();
    let r = rx.labels();
    let mut rng = substream(seed, &[tag::GAINS, t[0], t[1], t[2], r[0], r[1], r[2]]);
    let z: f64 = rng.sample(StandardNormal);
    let fading = (0..num_channels)
        .map(|_| {
            let f: f64 = rng.sample(Exp1);
            if fading_enabled {
                f
            } else {
                1.0
            }
        })
        .collect();
    LinkDraws {
        shadowing_db: shadowing_std * z,
        fading,
    }
}

/// Deterministic part of the gain, in dB.
pub fn pathloss_db(distance: f64, kappa_db: f64, alpha: f64) -> f64 {
    -kappa_db - 10.0 * alpha * distance.max(MIN_DISTANCE).log10()
}

/// Full link gain in dB.
pub fn link_gain_db(distance: f64, kappa_db: f64, alpha: f64, shadowing_db: f64, fading: f64) -> f64 {
    pathloss_db(distance, kappa_db, alpha) - shadowing_db + 10.0 * fading.log10()
}

/// Linear gains indexed by channel.
///
/// Receivers carry a flat index: receiver `r` of group `g` sits at
/// `offsets[g] + r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainTable {
    num_channels: usize,
    receivers: Vec<usize>,
    offsets: Vec<usize>,
    total_rx: usize,
    /// `[k]`: CU k to BS on channel k.
    cu_bs: Vec<f64>,
    /// `[g][k]`.
    mg_bs: Vec<f64>,
    /// `[j][rx][k]`: MGTX j to a receiver.
    mg_rx: Vec<f64>,
    /// `[k][rx]`: CU k to a receiver on channel k.
    cu_rx: Vec<f64>,
}

impl GainTable {
    /// All-zero table for `num_channels` channels and groups with the given
    /// receiver counts.
    pub fn zeros(num_channels: usize, receivers: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(receivers.len());
        let mut total_rx = 0;
        for &n in receivers {
            offsets.push(total_rx);
            total_rx += n;
        }
        let groups = receivers.len();
        GainTable {
            num_channels,
            receivers: receivers.to_vec(),
            offsets,
            total_rx,
            cu_bs: vec![0.0; num_channels],
            mg_bs: vec![0.0; groups * num_channels],
            mg_rx: vec![0.0; groups * total_rx * num_channels],
            cu_rx: vec![0.0; num_channels * total_rx],
        }
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn num_groups(&self) -> usize {
        self.receivers.len()
    }

    pub fn num_receivers(&self, g: usize) -> usize {
        self.receivers[g]
    }

    fn rx(&self, g: usize, r: usize) -> usize {
        debug_assert!(r < self.receivers[g]);
        self.offsets[g] + r
    }

    pub fn cu_bs(&self, k: usize) -> f64 {
        self.cu_bs[k]
    }

    pub fn mg_bs(&self, g: usize, k: usize) -> f64 {
        self.mg_bs[g * self.num_channels + k]
    }

    /// Gain from the transmitter of group `j` to receiver `r` of group `g`
    /// on channel `k`. `j == g` is the group's own link.
    pub fn mg_rx(&self, j: usize, g: usize, r: usize, k: usize) -> f64 {
        self.mg_rx[(j * self.total_rx + self.rx(g, r)) * self.num_channels + k]
    }

    /// Own-link gain of receiver `r` in group `g`.
    pub fn own(&self, g: usize, r: usize, k: usize) -> f64 {
        self.mg_rx(g, g, r, k)
    }

    /// Gain from CU `k` to receiver `r` of group `g` (on channel `k`).
    pub fn cu_rx(&self, k: usize, g: usize, r: usize) -> f64 {
        self.cu_rx[k * self.total_rx + self.rx(g, r)]
    }

    pub fn set_cu_bs(&mut self, k: usize, v: f64) {
        self.cu_bs[k] = v;
    }

    pub fn set_mg_bs(&mut self, g: usize, k: usize, v: f64) {
        let c = self.num_channels;
        self.mg_bs[g * c + k] = v;
    }

    pub fn set_mg_rx(&mut self, j: usize, g: usize, r: usize, k: usize, v: f64) {
        let idx = (j * self.total_rx + self.rx(g, r)) * self.num_channels + k;
        self.mg_rx[idx] = v;
    }

    pub fn set_cu_rx(&mut self, k: usize, g: usize, r: usize, v: f64) {
        let idx = k * self.total_rx + self.rx(g, r);
        self.cu_rx[idx] = v;
    }

    /// Sets a gain on every channel at once.
    pub fn set_mg_rx_all(&mut self, j: usize, g: usize, r: usize, v: f64) {
        for k in 0..self.num_channels {
            self.set_mg_rx(j, g, r, k, v);
        }
    }

    pub fn set_mg_bs_all(&mut self, g: usize, v: f64) {
        for k in 0..self.num_channels {
            self.set_mg_bs(g, k, v);
        }
    }

    pub fn all_finite_nonneg(&self) -> bool {
        self.cu_bs
            .iter()
            .chain(&self.mg_bs)
            .chain(&self.mg_rx)
            .chain(&self.cu_rx)
            .all(|v| v.is_finite() && *v >= 0.0)
    }
}

struct Sampler<'a> {
    cfg: &'a ScenarioConfig,
    seed: u64,
    channels: usize,
}

impl Sampler<'_> {
    /// Linear gains of one link on every channel.
    fn link(&self, tx: Node, rx: Node, d: f64) -> Vec<f64> {
        let draws = link_draws(
            self.seed,
            tx,
            rx,
            self.channels,
            self.cfg.shadowing_std,
            self.cfg.fading_enabled,
        );
        draws
            .fading
            .iter()
            .map(|&f| {
                let db = link_gain_db(
                    d,
                    self.cfg.pathloss_constant,
                    self.cfg.pathloss_exponent,
                    draws.shadowing_db,
                    f,
                );
                10f64.powf(db / 10.0)
            })
            .collect()
    }
}

/// Samples every link gain of `topology`. Deterministic in `(topology, seed)`.
pub fn sample_gains(topology: &Topology, config: &ScenarioConfig, seed: u64) -> Result<GainTable> {
    if topology.num_cus() != config.num_cus {
        return Err(Error::InvalidInput(format!(
            "topology has {} CUs, config {}",
            topology.num_cus(),
            config.num_cus
        )));
    }
    let channels = topology.num_cus();
    let counts = topology.receiver_counts();
    if let Some(g) = counts.iter().position(|&n| n == 0) {
        return Err(Error::EmptyGroup(g));
    }
    let mut table = GainTable::zeros(channels, &counts);
    let s = Sampler {
        cfg: config,
        seed,
        channels,
    };
    let bs = topology.bs;
    for (k, cu) in topology.cus.iter().enumerate() {
        table.cu_bs[k] = s.link(Node::Cu(k), Node::Bs, cu.distance(&bs))[k];
    }
    for (g, tx) in topology.mgtx.iter().enumerate() {
        for (k, v) in s.link(Node::Mgtx(g), Node::Bs, tx.distance(&bs)).into_iter().enumerate() {
            table.set_mg_bs(g, k, v);
        }
    }
    for (g, rxs) in topology.receivers.iter().enumerate() {
        for (r, rx) in rxs.iter().enumerate() {
            for (j, tx) in topology.mgtx.iter().enumerate() {
                let gains = s.link(Node::Mgtx(j), Node::Rx(g, r), tx.distance(rx));
                for (k, v) in gains.into_iter().enumerate() {
                    table.set_mg_rx(j, g, r, k, v);
                }
            }
            for (k, cu) in topology.cus.iter().enumerate() {
                let v = s.link(Node::Cu(k), Node::Rx(g, r), cu.distance(rx))[k];
                table.set_cu_rx(k, g, r, v);
            }
        }
    }
    Ok(table)
}

/// Distance between two nodes of a topology.
pub fn node_distance(topology: &Topology, a: Node, b: Node) -> f64 {
    let pos = |n: Node| -> Point {
        match n {
            Node::Bs => topology.bs,
            Node::Cu(k) => topology.cus[k],
            Node::Mgtx(g) => topology.mgtx[g],
            Node::Rx(g, r) => topology.receivers[g][r],
        }
    };
    pos(a).distance(&pos(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::generate_topology;

    #[test]
    fn all_terms_vanish() {
        assert_eq!(link_gain_db(10.0, 0.0, 0.0, 0.0, 1.0), 0.0);
        assert_eq!(10f64.powf(link_gain_db(123.0, 0.0, 0.0, 0.0, 1.0) / 10.0), 1.0);
    }

    #[test]
    fn hand_evaluated_pathloss() {
        assert!((link_gain_db(10.0, 0.0, 3.6, 0.0, 1.0) + 36.0).abs() < 1e-12);
    }

    #[test]
    fn clamps_short_distances() {
        assert_eq!(pathloss_db(0.0, 20.0, 3.6), pathloss_db(MIN_DISTANCE, 20.0, 3.6));
        assert_eq!(pathloss_db(0.3, 20.0, 3.6), -20.0);
    }

    #[test]
    fn strictly_decreasing_without_randomness() {
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let g = pathloss_db(i as f64 * 2.5, 20.0, 3.6);
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn table_is_finite_and_reproducible() {
        let cfg = ScenarioConfig {
            num_mgs: 4,
            ..Default::default()
        };
        let topo = generate_topology(&cfg, 3).unwrap();
        let a = sample_gains(&topo, &cfg, 11).unwrap();
        let b = sample_gains(&topo, &cfg, 11).unwrap();
        assert!(a.all_finite_nonneg());
        assert_eq!(a, b);
        let c = sample_gains(&topo, &cfg, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn deterministic_table_matches_pathloss() {
        let cfg = ScenarioConfig {
            num_mgs: 2,
            shadowing_std: 0.0,
            fading_enabled: false,
            ..Default::default()
        };
        let topo = generate_topology(&cfg, 5).unwrap();
        let t = sample_gains(&topo, &cfg, 1).unwrap();
        let d = node_distance(&topo, Node::Mgtx(1), Node::Rx(0, 2));
        let expect = 10f64.powf(pathloss_db(d, 20.0, 3.6) / 10.0);
        for k in 0..cfg.num_cus {
            assert!((t.mg_rx(1, 0, 2, k) / expect - 1.0).abs() < 1e-12);
        }
    }
}
