//! Monte Carlo experiment engine: one scenario per seed through the whole
//! pipeline, and sweeps of one parameter across policies with CSV output.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::alloc::{allocate, Policy};
use crate::config::{ReceiversPerGroup, ScenarioConfig};
use crate::error::{Error, Result};
use crate::gains::{sample_gains, GainTable};
use crate::metrics::{rate_cu, rate_mg, Assignment, PowerProfile};
use crate::power::{allocate_powers, max_powers};
use crate::rng::{derive_seed, tag};
use crate::topology::{generate_topology, Topology};

/// CU rates this far below the minimum (relative) still count as met.
const QOS_TOL: f64 = 1e-9;

/// Outcome of one simulated drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunMetrics {
    pub sum_throughput: f64,
    pub cu_throughput: f64,
    /// Multicast throughput delivered: each group's rate counted once per
    /// receiver.
    pub mg_throughput: f64,
    /// Sum of group rates, each counted once.
    pub mg_group_rate: f64,
    /// Groups on a channel that were not switched off by power allocation.
    pub assigned_mgs: usize,
    /// CUs below their minimum rate.
    pub qos_violations: usize,
    /// Groups switched off because their channel had no feasible point.
    pub dropped_mgs: usize,
    pub converged: bool,
}

impl RunMetrics {
    /// A run is flagged if any CU misses its minimum rate, a group had to
    /// be dropped, or power control did not converge.
    pub fn flagged(&self) -> bool {
        self.qos_violations > 0 || self.dropped_mgs > 0 || !self.converged
    }
}

/// Everything one run produced, for inspection and dumps.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub topology: Topology,
    pub gains: GainTable,
    pub assignment: Assignment,
    pub powers: PowerProfile,
    pub metrics: RunMetrics,
}

/// Topology, gains, channel allocation, power allocation and metrics for one
/// seed. Groups the power allocator drops are unassigned and contribute
/// nothing.
pub fn run_scenario(config: &ScenarioConfig, policy: Policy, seed: u64) -> Result<RunOutcome> {
    let topology = generate_topology(config, seed)?;
    let gains = sample_gains(&topology, config, seed)?;
    let mut assignment = allocate(policy, &topology, &gains, config, seed)?;
    let (powers, dropped, converged) = if policy.uses_max_power() {
        (max_powers(&assignment, config), Vec::new(), true)
    } else {
        let out = allocate_powers(&assignment, &gains, config)?;
        (out.powers, out.dropped, out.unconverged.is_empty())
    };
    for &g in &dropped {
        assignment.unassign(g);
    }
    let metrics = evaluate(&assignment, &powers, &gains, config, dropped.len(), converged)?;
    Ok(RunOutcome {
        topology,
        gains,
        assignment,
        powers,
        metrics,
    })
}

pub fn run_point(config: &ScenarioConfig, policy: Policy, seed: u64) -> Result<RunMetrics> {
    run_scenario(config, policy, seed).map(|o| o.metrics)
}

/// Throughput accounting for a finished allocation.
pub fn evaluate(
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    config: &ScenarioConfig,
    dropped_mgs: usize,
    converged: bool,
) -> Result<RunMetrics> {
    let radio = config.radio();
    let r_min = config.cu_min_rate();
    let mut cu = 0.0;
    let mut qos_violations = 0;
    for k in 0..assignment.num_channels() {
        let r = rate_cu(k, assignment, powers, gains, &radio);
        if r < r_min * (1.0 - QOS_TOL) {
            qos_violations += 1;
        }
        cu += r;
    }
    let (mut delivered, mut group_rate) = (0.0, 0.0);
    for g in 0..assignment.num_groups() {
        if let Some(k) = assignment.channel_of(g) {
            let r = rate_mg(g, k, assignment, powers, gains, &radio)?;
            group_rate += r;
            delivered += r * gains.num_receivers(g) as f64;
        }
    }
    Ok(RunMetrics {
        sum_throughput: cu + delivered,
        cu_throughput: cu,
        mg_throughput: delivered,
        mg_group_rate: group_rate,
        assigned_mgs: assignment.assigned_count(),
        qos_violations,
        dropped_mgs,
        converged,
    })
}

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    ReceiversPerMg,
    NumMgs,
    GeographicSpread,
    /// CU SINR threshold in dB.
    CuQosThreshold,
    /// Maximum MG transmit power in dBm.
    PgMax,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::ReceiversPerMg,
        SweepAxis::NumMgs,
        SweepAxis::GeographicSpread,
        SweepAxis::CuQosThreshold,
        SweepAxis::PgMax,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::ReceiversPerMg => "receivers_per_mg",
            SweepAxis::NumMgs => "num_mgs",
            SweepAxis::GeographicSpread => "geographic_spread",
            SweepAxis::CuQosThreshold => "cu_qos_threshold",
            SweepAxis::PgMax => "p_g_max",
        }
    }

    /// `config` with the axis set to `value`.
    pub fn apply(&self, config: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let count = || -> Result<usize> {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::Config(format!("{} needs a whole number, got {value}", self.name())))
            }
        };
        let mut c = config.clone();
        match self {
            SweepAxis::ReceiversPerMg => c.receivers_per_mg = ReceiversPerGroup::Uniform(count()?),
            SweepAxis::NumMgs => c.num_mgs = count()?,
            SweepAxis::GeographicSpread => c.geographic_spread = value,
            SweepAxis::CuQosThreshold => c.sinr_threshold_cu = value,
            SweepAxis::PgMax => c.p_g_max = value,
        }
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown sweep axis `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub config: ScenarioConfig,
    pub policies: Vec<Policy>,
    pub runs: usize,
    pub base_seed: u64,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one axis value".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("sweep needs at least one run".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("sweep needs at least one policy".into()));
        }
        for &v in &self.values {
            self.axis.apply(&self.config, v)?;
        }
        Ok(())
    }
}

/// Seed of run `index`. It depends on neither the policy nor the axis
/// value, so every policy and every point of a sweep sees the same drops
/// (common random numbers).
pub fn run_seed(base_seed: u64, index: usize) -> u64 {
    derive_seed(base_seed, &[tag::RUN, index as u64])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub policy: Policy,
    pub axis_value: f64,
    pub run_seed: u64,
    pub metrics: RunMetrics,
}

/// Aggregates over the runs of one (policy, axis value) point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub policy: Policy,
    pub axis_value: f64,
    pub runs: usize,
    pub mean_sum_throughput: f64,
    pub std_sum_throughput: f64,
    pub mean_cu_throughput: f64,
    pub mean_mg_throughput: f64,
    pub mean_assigned_mgs: f64,
    /// Runs with at least one CU below its minimum rate.
    pub qos_violation_runs: usize,
    pub unconverged_runs: usize,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: SweepAxis,
    /// Ordered by policy (sweep order), axis value, then run index.
    pub records: Vec<RunRecord>,
    pub summary: Vec<PointSummary>,
}

impl SweepResult {
    pub fn point(&self, policy: Policy, axis_value: f64) -> Option<&PointSummary> {
        self.summary
            .iter()
            .find(|s| s.policy == policy && s.axis_value == axis_value)
    }

    /// Mean sum throughput of `policy` at each axis value, in sweep order.
    pub fn means(&self, policy: Policy) -> Vec<f64> {
        self.summary
            .iter()
            .filter(|s| s.policy == policy)
            .map(|s| s.mean_sum_throughput)
            .collect()
    }

    pub fn flagged_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let n = self.records.iter().filter(|r| r.metrics.flagged()).count();
        n as f64 / self.records.len() as f64
    }
}

impl Serialize for Policy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Runs every (policy, axis value, run) combination in parallel. Records
/// come back in a fixed order and the aggregates are computed from them
/// sequentially, so results do not depend on scheduling.
pub fn run_sweep(sweep: &Sweep) -> Result<SweepResult> {
    sweep.validate()?;
    let configs: Vec<ScenarioConfig> = sweep
        .values
        .iter()
        .map(|&v| sweep.axis.apply(&sweep.config, v))
        .collect::<Result<_>>()?;
    let mut tasks = Vec::new();
    for (pi, _) in sweep.policies.iter().enumerate() {
        for vi in 0..sweep.values.len() {
            for run in 0..sweep.runs {
                tasks.push((pi, vi, run));
            }
        }
    }
    let records: Vec<RunRecord> = tasks
        .par_iter()
        .map(|&(pi, vi, run)| {
            let seed = run_seed(sweep.base_seed, run);
            let policy = sweep.policies[pi];
            run_point(&configs[vi], policy, seed).map(|metrics| RunRecord {
                policy,
                axis_value: sweep.values[vi],
                run_seed: seed,
                metrics,
            })
        })
        .collect::<Result<_>>()?;
    let summary = records.chunks(sweep.runs).map(summarize).collect();
    Ok(SweepResult {
        axis: sweep.axis,
        records,
        summary,
    })
}

fn summarize(runs: &[RunRecord]) -> PointSummary {
    let n = runs.len() as f64;
    let mean = |f: &dyn Fn(&RunMetrics) -> f64| runs.iter().map(|r| f(&r.metrics)).sum::<f64>() / n;
    let mean_sum = mean(&|m| m.sum_throughput);
    let var = if runs.len() > 1 {
        runs.iter()
            .map(|r| (r.metrics.sum_throughput - mean_sum).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    PointSummary {
        policy: runs[0].policy,
        axis_value: runs[0].axis_value,
        runs: runs.len(),
        mean_sum_throughput: mean_sum,
        std_sum_throughput: var.sqrt(),
        mean_cu_throughput: mean(&|m| m.cu_throughput),
        mean_mg_throughput: mean(&|m| m.mg_throughput),
        mean_assigned_mgs: mean(&|m| m.assigned_mgs as f64),
        qos_violation_runs: runs.iter().filter(|r| r.metrics.qos_violations > 0).count(),
        unconverged_runs: runs.iter().filter(|r| !r.metrics.converged).count(),
    }
}

pub const CSV_HEADER: &str = "policy,axis,axis_value,run_seed,sum_throughput_bps,cu_throughput_bps,mg_throughput_bps,assigned_mgs,qos_violations,converged";

/// Shortest round-trip formatting, so equal results give equal bytes.
fn num(v: f64) -> String {
    format!("{v}")
}

/// CSV rows preceded by a `# config_hash=...` comment line.
pub fn write_csv(out: &mut impl Write, axis: &str, records: &[RunRecord], config_hash: &str) -> Result<()> {
    writeln!(out, "# config_hash={config_hash}")?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let m = &r.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.policy,
            axis,
            num(r.axis_value),
            r.run_seed,
            num(m.sum_throughput),
            num(m.cu_throughput),
            num(m.mg_throughput),
            m.assigned_mgs,
            m.qos_violations,
            m.converged
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config_hash: String,
    axis: &'a str,
    values: &'a [f64],
    policies: Vec<&'static str>,
    runs: usize,
    base_seed: u64,
    config: &'a ScenarioConfig,
    summary: &'a [PointSummary],
}

/// Writes `<stem>.csv` and `<stem>.json` (configuration and aggregates) in
/// `dir`; returns the two paths.
pub fn write_sweep_files(
    dir: &Path,
    stem: &str,
    sweep: &Sweep,
    result: &SweepResult,
) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let hash = sweep.config.hash_hex();
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut buf = Vec::new();
    write_csv(&mut buf, sweep.axis.name(), &result.records, &hash)?;
    std::fs::write(&csv_path, buf)?;
    let sidecar = Sidecar {
        config_hash: hash,
        axis: sweep.axis.name(),
        values: &sweep.values,
        policies: sweep.policies.iter().map(|p| p.name()).collect(),
        runs: sweep.runs,
        base_seed: sweep.base_seed,
        config: &sweep.config,
        summary: &result.summary,
    };
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&json_path, serde_json::to_string_pretty(&sidecar)? + "\n")?;
    Ok((csv_path, json_path))
}
