//! Node placement inside a circular cell with the base station at the origin.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::rng::{substream, tag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub cell_radius: f64,
    pub bs: Point,
    pub cus: Vec<Point>,
    pub mgtx: Vec<Point>,
    /// `receivers[g]` are the receivers of group `g`.
    pub receivers: Vec<Vec<Point>>,
}

impl Topology {
    pub fn num_cus(&self) -> usize {
        self.cus.len()
    }

    pub fn num_groups(&self) -> usize {
        self.mgtx.len()
    }

    pub fn receiver_counts(&self) -> Vec<usize> {
        self.receivers.iter().map(Vec::len).collect()
    }

    /// Distance from the transmitter of `g` to its farthest receiver.
    pub fn group_radius(&self, g: usize) -> f64 {
        self.receivers[g]
            .iter()
            .map(|r| r.distance(&self.mgtx[g]))
            .fold(0.0, f64::max)
    }
}

/// Uniform point in the disc of radius `radius` centred at `center`.
fn uniform_in_disc<R: Rng>(rng: &mut R, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Places CUs and multicast transmitters uniformly in the cell, and each
/// group's receivers uniformly within `geographic_spread` of its transmitter,
/// redrawing any receiver that falls outside the cell.
///
/// CUs, transmitters, and each group's receivers use separate substreams, so
/// changing one population's size leaves the others in place.
pub fn generate_topology(config: &ScenarioConfig, seed: u64) -> Result<Topology> {
    config.validate()?;
    let radius = config.cell_radius;
    let mut cu_rng = substream(seed, &[tag::TOPOLOGY_CU]);
    let cus = (0..config.num_cus)
        .map(|_| uniform_in_disc(&mut cu_rng, Point::ORIGIN, radius))
        .collect();
    let mut tx_rng = substream(seed, &[tag::TOPOLOGY_MGTX]);
    let mgtx: Vec<Point> = (0..config.num_mgs)
        .map(|_| uniform_in_disc(&mut tx_rng, Point::ORIGIN, radius))
        .collect();
    let receivers = mgtx
        .iter()
        .enumerate()
        .map(|(g, &tx)| {
            let mut rng = substream(seed, &[tag::TOPOLOGY_RX, g as u64]);
            (0..config.receivers(g))
                .map(|_| loop {
                    let p = uniform_in_disc(&mut rng, tx, config.geographic_spread);
                    if p.norm() <= radius {
                        break p;
                    }
                })
                .collect()
        })
        .collect();
    Ok(Topology {
        cell_radius: radius,
        bs: Point::ORIGIN,
        cus,
        mgtx,
        receivers,
    })
}
