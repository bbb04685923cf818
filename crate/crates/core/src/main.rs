//! Command-line front end: validate configurations, run scenarios and
//! sweeps, dump intermediate artifacts and run the oracle checks.
//!
//! Exit status: 0 on success, 1 on a usage or configuration error, 2 when
//! more than half of the simulated runs are flagged (CU below its minimum
//! rate, a group dropped, or power control not converged), 3 when an oracle
//! check fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use d2dsim::alloc::Policy;
use d2dsim::config::ScenarioConfig;
use d2dsim::error::{Error, Result};
use d2dsim::harness::{
    run_scenario, run_seed, run_sweep, write_csv, write_sweep_files, PointSummary, RunRecord, Sweep, SweepAxis,
    SweepResult,
};
use d2dsim::metrics::{Assignment, PowerProfile};
use d2dsim::verify::{self, Check};

#[derive(Parser, Debug)]
#[command(name = "d2dsim", version, about = "D2D multicast underlay simulator")]
struct Cli {
    /// Scenario file (`key = value` lines); defaults apply when omitted.
    #[arg(long, global = true, env = "D2DSIM_CONFIG")]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, global = true, env = "D2DSIM_OUT", default_value = "out")]
    out: PathBuf,
    /// Base seed (overrides `rng_seed`).
    #[arg(long, global = true, env = "D2DSIM_SEED")]
    seed: Option<u64>,
    /// Channel-allocation policy, or a comma-separated list for `sweep`.
    #[arg(long, global = true, env = "D2DSIM_POLICY")]
    policy: Option<String>,
    /// Monte Carlo runs per point (overrides `monte_carlo_runs`).
    #[arg(long, global = true, env = "D2DSIM_RUNS")]
    runs: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "D2DSIM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a configuration and print its hash.
    Validate,
    /// Simulate the configured scenario for every run seed.
    Run,
    /// Sweep one parameter across policies.
    Sweep {
        /// receivers_per_mg, num_mgs, geographic_spread, cu_qos_threshold or p_g_max.
        #[arg(long, value_parser = |s: &str| s.parse::<SweepAxis>().map_err(|e| e.to_string()))]
        axis: SweepAxis,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Compare the solvers with their oracles.
    Oracle {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Write the channel assignment and powers of one drop as JSON.
    DumpAssignment,
    /// Write the topology and gain table of one drop as JSON.
    DumpGains,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Suite {
    Hungarian,
    Pair,
    Corner,
    Ppp,
    Bound,
    Stim,
    All,
}

enum Outcome {
    Ok,
    Flooded,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Flooded) => ExitCode::from(2),
        Ok(Outcome::CheckFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    for kv in &cli.overrides {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(key.trim(), value)?;
    }
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    if let Some(runs) = cli.runs {
        cfg.monte_carlo_runs = runs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn policies(cli: &Cli, cfg: &ScenarioConfig, default: &[Policy]) -> Result<Vec<Policy>> {
    match &cli.policy {
        None => Ok(default.to_vec()),
        Some(list) => list.split(',').map(|p| Policy::parse_with(p, cfg)).collect(),
    }
}

fn single_policy(cli: &Cli, cfg: &ScenarioConfig) -> Result<Policy> {
    match policies(cli, cfg, &[Policy::InterferenceAware])?.as_slice() {
        [p] => Ok(*p),
        _ => Err(Error::Config("this command takes a single policy".into())),
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Validate => {
            let cfg = load_config(cli)?;
            println!("config ok, hash {}", cfg.hash_hex());
            Ok(Outcome::Ok)
        }
        Command::Run => run(cli),
        Command::Sweep { axis, values } => sweep(cli, *axis, values),
        Command::Oracle { suite } => oracle(*suite),
        Command::DumpAssignment => dump_assignment(cli),
        Command::DumpGains => dump_gains(cli),
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = load_config(cli)?;
    let policy = single_policy(cli, &cfg)?;
    let records: Vec<RunRecord> = (0..cfg.monte_carlo_runs)
        .map(|i| {
            let seed = run_seed(cfg.rng_seed, i);
            run_scenario(&cfg, policy, seed).map(|o| RunRecord {
                policy,
                axis_value: 0.0,
                run_seed: seed,
                metrics: o.metrics,
            })
        })
        .collect::<Result<_>>()?;
    std::fs::create_dir_all(&cli.out)?;
    let path = cli.out.join("run.csv");
    let mut buf = Vec::new();
    write_csv(&mut buf, "none", &records, &cfg.hash_hex())?;
    std::fs::write(&path, buf)?;
    write_json(&cli.out.join("run.json"), &Sidecar { config_hash: cfg.hash_hex(), config: &cfg })?;
    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.metrics.sum_throughput).sum::<f64>() / n;
    let flagged = records.iter().filter(|r| r.metrics.flagged()).count();
    println!(
        "{policy}: {} runs, mean sum throughput {:.3} Mbit/s, {flagged} flagged -> {}",
        records.len(),
        mean / 1e6,
        path.display()
    );
    Ok(if flagged as f64 > 0.5 * n { Outcome::Flooded } else { Outcome::Ok })
}

fn sweep(cli: &Cli, axis: SweepAxis, values: &[f64]) -> Result<Outcome> {
    let cfg = load_config(cli)?;
    let sweep = Sweep {
        axis,
        values: values.to_vec(),
        policies: policies(cli, &cfg, &[Policy::InterferenceAware])?,
        runs: cfg.monte_carlo_runs,
        base_seed: cfg.rng_seed,
        config: cfg,
    };
    let result = run_sweep(&sweep)?;
    let (csv, json) = write_sweep_files(&cli.out, &format!("sweep_{}", axis.name()), &sweep, &result)?;
    print_summary(&result);
    println!("wrote {} and {}", csv.display(), json.display());
    let flagged = result.flagged_fraction();
    if flagged > 0.5 {
        eprintln!("{:.0}% of runs flagged", 100.0 * flagged);
        return Ok(Outcome::Flooded);
    }
    Ok(Outcome::Ok)
}

fn print_summary(result: &SweepResult) {
    println!(
        "{:<20} {:>12} {:>14} {:>12} {:>9} {:>5} {:>5}",
        "policy",
        result.axis.name(),
        "mean Mbit/s",
        "std Mbit/s",
        "assigned",
        "qos",
        "unconv"
    );
    for s in &result.summary {
        let PointSummary { policy, axis_value, .. } = s;
        println!(
            "{:<20} {:>12} {:>14.3} {:>12.3} {:>9.2} {:>5} {:>5}",
            policy.name(),
            axis_value,
            s.mean_sum_throughput / 1e6,
            s.std_sum_throughput / 1e6,
            s.mean_assigned_mgs,
            s.qos_violation_runs,
            s.unconverged_runs
        );
    }
}

fn oracle(suite: Suite) -> Result<Outcome> {
    let cfg = ScenarioConfig::default();
    let want = |s: Suite| suite == s || suite == Suite::All;
    let mut checks: Vec<Check> = Vec::new();
    if want(Suite::Hungarian) {
        checks.push(verify::hungarian_golden()?);
        checks.push(verify::hungarian_oracle(500, 6, 1)?);
    }
    if want(Suite::Pair) {
        checks.push(verify::pair_oracle(&cfg, 200, 200, 1)?);
    }
    if want(Suite::Corner) {
        checks.push(verify::corner_golden());
        checks.push(verify::corner_oracle(&cfg, 100, 50, 1)?);
    }
    if want(Suite::Ppp) {
        checks.push(verify::outage_vs_ppp(100_000, 1)?);
    }
    if want(Suite::Bound) {
        checks.push(verify::prop1_property(&cfg, 1000, 1)?);
    }
    if want(Suite::Stim) {
        checks.push(verify::stim_fixed_point(&cfg, 100, 1)?);
    }
    for c in &checks {
        println!("{c}");
    }
    Ok(if checks.iter().all(|c| c.passed) { Outcome::Ok } else { Outcome::CheckFailed })
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config_hash: String,
    config: &'a ScenarioConfig,
}

#[derive(Serialize)]
struct AssignmentDump<'a> {
    config_hash: String,
    policy: &'static str,
    seed: u64,
    assignment: &'a Assignment,
    powers: &'a PowerProfile,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn dump_assignment(cli: &Cli) -> Result<Outcome> {
    let cfg = load_config(cli)?;
    let policy = single_policy(cli, &cfg)?;
    let out = run_scenario(&cfg, policy, cfg.rng_seed)?;
    let path = cli.out.join("assignment.json");
    write_json(
        &path,
        &AssignmentDump {
            config_hash: cfg.hash_hex(),
            policy: policy.name(),
            seed: cfg.rng_seed,
            assignment: &out.assignment,
            powers: &out.powers,
        },
    )?;
    println!("{} groups assigned -> {}", out.assignment.assigned_count(), path.display());
    Ok(Outcome::Ok)
}

fn dump_gains(cli: &Cli) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Dump<'a> {
        config_hash: String,
        seed: u64,
        topology: &'a d2dsim::topology::Topology,
        gains: &'a d2dsim::gains::GainTable,
    }
    let cfg = load_config(cli)?;
    let topology = d2dsim::topology::generate_topology(&cfg, cfg.rng_seed)?;
    let gains = d2dsim::gains::sample_gains(&topology, &cfg, cfg.rng_seed)?;
    let path = cli.out.join("gains.json");
    write_json(
        &path,
        &Dump {
            config_hash: cfg.hash_hex(),
            seed: cfg.rng_seed,
            topology: &topology,
            gains: &gains,
        },
    )?;
    println!("gains for {} channels, {} groups -> {}", gains.num_channels(), gains.num_groups(), path.display());
    Ok(Outcome::Ok)
}
