//! Scenario configuration: the simulation parameters, their validation, and
//! the flat `key = value` file format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::units::{db_to_linear, dbm_to_watts};

/// Number of receivers in each multicast group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReceiversPerGroup {
    Uniform(usize),
    PerGroup(Vec<usize>),
}

impl ReceiversPerGroup {
    /// Receiver count of group `g`. A per-group list shorter than the group
    /// count repeats cyclically.
    pub fn count(&self, g: usize) -> usize {
        match self {
            ReceiversPerGroup::Uniform(n) => *n,
            ReceiversPerGroup::PerGroup(v) => v[g % v.len()],
        }
    }

    fn is_valid(&self) -> bool {
        match self {
            ReceiversPerGroup::Uniform(n) => *n >= 1,
            ReceiversPerGroup::PerGroup(v) => !v.is_empty() && v.iter().all(|&n| n >= 1),
        }
    }
}

impl fmt::Display for ReceiversPerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceiversPerGroup::Uniform(n) => write!(f, "{n}"),
            ReceiversPerGroup::PerGroup(v) => {
                let parts: Vec<String> = v.iter().map(|n| n.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

/// Channel-selection objective of the outage-aware allocator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageObjective {
    /// Minimise the outage of one priority group.
    PriorityGroup,
    /// Minimise the largest outage on the channel.
    MinMax,
    /// Minimise the summed outage on the channel.
    MinSum,
}

impl FromStr for OutageObjective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "obj1" | "priority_group" => Ok(OutageObjective::PriorityGroup),
            "2" | "obj2" | "min_max" => Ok(OutageObjective::MinMax),
            "3" | "obj3" | "min_sum" => Ok(OutageObjective::MinSum),
            other => Err(Error::Config(format!("unknown outage objective `{other}`"))),
        }
    }
}

/// All parameters of one simulated scenario.
///
/// Powers, thresholds and noise are stored in the units users write them in
/// (dBm / dB); the `*_w` and `*_linear` accessors do the one conversion to
/// linear scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Cell radius in metres.
    pub cell_radius: f64,
    pub num_cus: usize,
    pub num_mgs: usize,
    pub receivers_per_mg: ReceiversPerGroup,
    /// Maximum MGTX to MGRX distance in metres.
    pub geographic_spread: f64,
    /// Path-loss constant in dB.
    pub pathloss_constant: f64,
    pub pathloss_exponent: f64,
    /// Log-normal shadowing standard deviation in dB.
    pub shadowing_std: f64,
    /// Rayleigh block fading on/off.
    pub fading_enabled: bool,
    /// Noise power in dBm.
    pub noise_power: f64,
    /// Bandwidth of each channel in Hz.
    pub bandwidth_per_channel: f64,
    pub p_c_max: f64,
    pub p_g_max: f64,
    /// CU SINR threshold in dB; also fixes the CU minimum rate.
    pub sinr_threshold_cu: f64,
    /// MG worst-receiver SINR threshold in dB.
    pub sinr_threshold_mg: f64,
    /// Target SIR of the outage model in dB.
    pub outage_target: f64,
    pub outage_prob_threshold: f64,
    /// Minimum own-to-cross gain ratio for co-channel groups (linear).
    pub gain_ratio_threshold: f64,
    /// Per-channel interference cap at the BS in watts. `None` derives it
    /// from the CU minimum rate at full CU power.
    pub interference_cap: Option<f64>,
    /// CU density for the outage model, nodes/m^2.
    pub density_cu: f64,
    /// MG transmitter density for the outage model, nodes/m^2.
    pub density_mg: f64,
    pub outage_objective: OutageObjective,
    /// Priority group for [`OutageObjective::PriorityGroup`].
    pub priority_group: usize,
    /// Count only the strongest known interferer in the outage model.
    pub dominant_interferer_only: bool,
    /// Relative power change at which the iterative power control stops.
    pub stim_tolerance: f64,
    pub stim_max_iterations: usize,
    /// Lower bound on the CU power after iterative power control, in dBm.
    /// `None` means the CU transmits at `p_c_max`.
    pub cu_power_floor: Option<f64>,
    pub rng_seed: u64,
    pub monte_carlo_runs: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            cell_radius: 500.0,
            num_cus: 3,
            num_mgs: 5,
            receivers_per_mg: ReceiversPerGroup::Uniform(4),
            geographic_spread: 50.0,
            pathloss_constant: 20.0,
            pathloss_exponent: 3.6,
            shadowing_std: 8.0,
            fading_enabled: true,
            noise_power: -114.0,
            bandwidth_per_channel: 1e6,
            p_c_max: 30.0,
            p_g_max: 30.0,
            sinr_threshold_cu: 5.0,
            sinr_threshold_mg: 5.0,
            outage_target: 0.0,
            outage_prob_threshold: 0.1,
            gain_ratio_threshold: 10.0,
            interference_cap: None,
            density_cu: 1e-6,
            density_mg: 1e-6,
            outage_objective: OutageObjective::MinSum,
            priority_group: 0,
            dominant_interferer_only: false,
            stim_tolerance: 1e-6,
            stim_max_iterations: 500,
            cu_power_floor: None,
            rng_seed: 1,
            monte_carlo_runs: 100,
        }
    }
}

const KEYS: &[&str] = &[
    "cell_radius",
    "num_cus",
    "num_mgs",
    "receivers_per_mg",
    "geographic_spread",
    "pathloss_constant",
    "pathloss_exponent",
    "shadowing_std",
    "fading_enabled",
    "noise_power",
    "bandwidth_per_channel",
    "p_c_max",
    "p_g_max",
    "sinr_threshold_cu",
    "sinr_threshold_mg",
    "outage_target",
    "outage_prob_threshold",
    "gain_ratio_threshold",
    "interference_cap",
    "density_cu",
    "density_mg",
    "outage_objective",
    "priority_group",
    "dominant_interferer_only",
    "stim_tolerance",
    "stim_max_iterations",
    "cu_power_floor",
    "rng_seed",
    "monte_carlo_runs",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

fn parse_optional(key: &str, value: &str) -> Result<Option<f64>> {
    match value.trim() {
        "auto" | "none" | "" => Ok(None),
        v => parse_num(key, v).map(Some),
    }
}

impl ScenarioConfig {
    /// Parses the `key = value` format on top of the defaults. Unknown keys
    /// are errors; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "cell_radius" => self.cell_radius = parse_num(key, value)?,
            "num_cus" => self.num_cus = parse_num(key, value)?,
            "num_mgs" => self.num_mgs = parse_num(key, value)?,
            "receivers_per_mg" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                self.receivers_per_mg = if parts.len() == 1 {
                    ReceiversPerGroup::Uniform(parse_num(key, parts[0])?)
                } else {
                    ReceiversPerGroup::PerGroup(
                        parts.iter().map(|p| parse_num(key, p)).collect::<Result<_>>()?,
                    )
                };
            }
            "geographic_spread" => self.geographic_spread = parse_num(key, value)?,
            "pathloss_constant" => self.pathloss_constant = parse_num(key, value)?,
            "pathloss_exponent" => self.pathloss_exponent = parse_num(key, value)?,
            "shadowing_std" => self.shadowing_std = parse_num(key, value)?,
            "fading_enabled" => self.fading_enabled = parse_bool(key, value)?,
            "noise_power" => self.noise_power = parse_num(key, value)?,
            "bandwidth_per_channel" => self.bandwidth_per_channel = parse_num(key, value)?,
            "p_c_max" => self.p_c_max = parse_num(key, value)?,
            "p_g_max" => self.p_g_max = parse_num(key, value)?,
            "sinr_threshold_cu" => self.sinr_threshold_cu = parse_num(key, value)?,
            "sinr_threshold_mg" => self.sinr_threshold_mg = parse_num(key, value)?,
            "outage_target" => self.outage_target = parse_num(key, value)?,
            "outage_prob_threshold" => self.outage_prob_threshold = parse_num(key, value)?,
            "gain_ratio_threshold" => self.gain_ratio_threshold = parse_num(key, value)?,
            "interference_cap" => self.interference_cap = parse_optional(key, value)?,
            "density_cu" => self.density_cu = parse_num(key, value)?,
            "density_mg" => self.density_mg = parse_num(key, value)?,
            "outage_objective" => self.outage_objective = value.parse()?,
            "priority_group" => self.priority_group = parse_num(key, value)?,
            "dominant_interferer_only" => self.dominant_interferer_only = parse_bool(key, value)?,
            "stim_tolerance" => self.stim_tolerance = parse_num(key, value)?,
            "stim_max_iterations" => self.stim_max_iterations = parse_num(key, value)?,
            "cu_power_floor" => self.cu_power_floor = parse_optional(key, value)?,
            "rng_seed" => self.rng_seed = parse_num(key, value)?,
            "monte_carlo_runs" => self.monte_carlo_runs = parse_num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Serialises back to the `key = value` format. Parsing the output
    /// yields an equal config.
    pub fn to_kv(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map_or_else(|| "auto".to_string(), |x| format!("{x:?}"))
        }
        let objective = match self.outage_objective {
            OutageObjective::PriorityGroup => "priority_group",
            OutageObjective::MinMax => "min_max",
            OutageObjective::MinSum => "min_sum",
        };
        let values: Vec<String> = vec![
            format!("{:?}", self.cell_radius),
            self.num_cus.to_string(),
            self.num_mgs.to_string(),
            self.receivers_per_mg.to_string(),
            format!("{:?}", self.geographic_spread),
            format!("{:?}", self.pathloss_constant),
            format!("{:?}", self.pathloss_exponent),
            format!("{:?}", self.shadowing_std),
            self.fading_enabled.to_string(),
            format!("{:?}", self.noise_power),
            format!("{:?}", self.bandwidth_per_channel),
            format!("{:?}", self.p_c_max),
            format!("{:?}", self.p_g_max),
            format!("{:?}", self.sinr_threshold_cu),
            format!("{:?}", self.sinr_threshold_mg),
            format!("{:?}", self.outage_target),
            format!("{:?}", self.outage_prob_threshold),
            format!("{:?}", self.gain_ratio_threshold),
            opt(self.interference_cap),
            format!("{:?}", self.density_cu),
            format!("{:?}", self.density_mg),
            objective.to_string(),
            self.priority_group.to_string(),
            self.dominant_interferer_only.to_string(),
            format!("{:?}", self.stim_tolerance),
            self.stim_max_iterations.to_string(),
            opt(self.cu_power_floor),
            self.rng_seed.to_string(),
            self.monte_carlo_runs.to_string(),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Short stable fingerprint of the configuration.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.to_kv().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.cell_radius > 0.0 && self.cell_radius.is_finite()) {
            return fail(format!("cell_radius must be > 0, got {}", self.cell_radius));
        }
        if self.num_cus < 1 {
            return fail("num_cus must be >= 1".into());
        }
        if !self.receivers_per_mg.is_valid() {
            return fail("every multicast group needs at least one receiver".into());
        }
        if !(self.geographic_spread > 0.0 && self.geographic_spread < self.cell_radius) {
            return fail(format!(
                "geographic_spread must lie in (0, cell_radius), got {}",
                self.geographic_spread
            ));
        }
        if !(2.0..=6.0).contains(&self.pathloss_exponent) {
            return fail(format!(
                "pathloss_exponent must lie in [2, 6], got {}",
                self.pathloss_exponent
            ));
        }
        if !(self.shadowing_std >= 0.0) {
            return fail("shadowing_std must be >= 0".into());
        }
        for (name, dbm) in [
            ("noise_power", self.noise_power),
            ("p_c_max", self.p_c_max),
            ("p_g_max", self.p_g_max),
        ] {
            let w = dbm_to_watts(dbm);
            if !(w > 0.0 && w.is_finite()) {
                return fail(format!("{name} = {dbm} dBm is not a positive finite power"));
            }
        }
        if !(self.bandwidth_per_channel > 0.0) {
            return fail("bandwidth_per_channel must be > 0".into());
        }
        if !(self.outage_prob_threshold > 0.0 && self.outage_prob_threshold < 1.0) {
            return fail("outage_prob_threshold must lie in (0, 1)".into());
        }
        if !(self.gain_ratio_threshold >= 0.0) {
            return fail("gain_ratio_threshold must be >= 0".into());
        }
        if let Some(cap) = self.interference_cap {
            if !(cap >= 0.0) {
                return fail("interference_cap must be >= 0".into());
            }
        }
        if !(self.density_cu >= 0.0 && self.density_mg >= 0.0) {
            return fail("densities must be >= 0".into());
        }
        if !(self.stim_tolerance > 0.0) || self.stim_max_iterations == 0 {
            return fail("stim_tolerance must be > 0 and stim_max_iterations >= 1".into());
        }
        if self.monte_carlo_runs == 0 {
            return fail("monte_carlo_runs must be >= 1".into());
        }
        Ok(())
    }

    pub fn receivers(&self, g: usize) -> usize {
        self.receivers_per_mg.count(g)
    }

    pub fn noise_w(&self) -> f64 {
        dbm_to_watts(self.noise_power)
    }

    pub fn p_c_max_w(&self) -> f64 {
        dbm_to_watts(self.p_c_max)
    }

    pub fn p_g_max_w(&self) -> f64 {
        dbm_to_watts(self.p_g_max)
    }

    pub fn gamma_cu(&self) -> f64 {
        db_to_linear(self.sinr_threshold_cu)
    }

    pub fn gamma_mg(&self) -> f64 {
        db_to_linear(self.sinr_threshold_mg)
    }

    pub fn outage_target_linear(&self) -> f64 {
        db_to_linear(self.outage_target)
    }

    /// Minimum CU rate implied by the CU SINR threshold, bits/s.
    pub fn cu_min_rate(&self) -> f64 {
        self.bandwidth_per_channel * (1.0 + self.gamma_cu()).log2()
    }

    pub fn radio(&self) -> crate::metrics::Radio {
        crate::metrics::Radio {
            noise_w: self.noise_w(),
            bandwidth_hz: self.bandwidth_per_channel,
        }
    }
}
