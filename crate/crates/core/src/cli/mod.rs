//! `privlim` command-line front end.
//!
//! Exit codes: 0 success, 1 semantic negative (violation found, odd total),
//! 2 malformed input, 3 solver limits (infeasible, too large).

pub mod files;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::domain::{materialize, MAInstance, PartitionInstance, SingleTargetInstance};
use crate::econ_sim::{expected_drift, simulate, SimConfig, DEFAULT_POOL_SIZE};
use crate::error::Error;
use crate::merge_avoidance::{
    bounds, has_partition, heuristic_multi_target, partition_to_ma, solve_multi_target_exact,
    solve_single_target, DEFAULT_NODE_BUDGET,
};
use crate::mixing_scheme::{impossibility_witness, neutral_t0, verify, Verdict};

use files::{
    DesignOutput, MultiTargetOutput, PmfFile, ReduceOutput, RewardTableFile, SchemeSource, SimFile,
    SingleTargetOutput,
};

#[derive(Debug, Parser)]
#[command(
    name = "privlim",
    version,
    about = "Merge avoidance and mixing-scheme incentive analysis"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge-avoidance solvers
    #[command(subcommand)]
    Ma(MaCommand),
    /// Reward-and-tax scheme analysis
    #[command(subcommand)]
    Scheme(SchemeCommand),
    /// Ledger simulation
    #[command(subcommand)]
    Sim(SimCommand),
}

#[derive(Debug, Subcommand)]
pub enum MaCommand {
    /// Solve a single- or multi-target instance
    Solve(SolveArgs),
    /// Reduce a partition instance to merge avoidance
    Reduce(ReduceArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Single-target instance: {"values": [...], "v": n}
    #[arg(long, required_unless_present = "multi", conflicts_with = "multi")]
    pub single: Option<PathBuf>,
    /// Multi-target instance: {"inputs": [...], "outputs": [...]}
    #[arg(long)]
    pub multi: Option<PathBuf>,
    /// Use the northwest-corner heuristic instead of the exact solver
    #[arg(long, conflicts_with = "single")]
    pub heuristic: bool,
    /// Largest inputs x outputs the exact solver accepts
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Partition instance: {"elements": [...]}
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SchemeCommand {
    /// Check edge-insertion resistance of a scheme
    Verify(VerifyArgs),
    /// Complete a scheme with the credit-neutral T0
    Design(DesignArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Scheme config, or {"R": [...]} with --impossibility
    pub input: PathBuf,
    /// Only check a single Sybil (k = 1)
    #[arg(long)]
    pub base_case: bool,
    /// Treat the input as a zero-tax reward table and find a witness
    #[arg(long, conflicts_with = "base_case")]
    pub impossibility: bool,
    #[arg(long)]
    pub lmax: Option<u32>,
    #[arg(long)]
    pub kmax: Option<u32>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Scheme config; T0 is ignored
    pub input: PathBuf,
    /// Route-length pmf: [[l, "p/q"], ...]
    #[arg(long)]
    pub pmf: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SimCommand {
    /// Run a seeded ledger simulation
    Run(SimArgs),
}

#[derive(Debug, Args)]
pub struct SimArgs {
    pub input: PathBuf,
    /// Override the config seed
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the supply trace as CSV
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(Box<Error>),
    #[error("{path}: {msg}")]
    Input { path: String, msg: String },
    #[error("cannot write {path}: {msg}")]
    Output { path: String, msg: String },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(Box::new(e))
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) => e.exit_code(),
            CliError::Input { .. } | CliError::Output { .. } => 2,
        }
    }
}

/// Entry point used by the binary. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(config: &RunConfig) -> Result<i32, CliError> {
    match &config.command {
        Command::Ma(MaCommand::Solve(a)) => ma_solve(a),
        Command::Ma(MaCommand::Reduce(a)) => ma_reduce(a),
        Command::Scheme(SchemeCommand::Verify(a)) => scheme_verify(a),
        Command::Scheme(SchemeCommand::Design(a)) => scheme_design(a),
        Command::Sim(SimCommand::Run(a)) => sim_run(a),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let input_err = |msg: String| CliError::Input {
        path: path.display().to_string(),
        msg,
    };
    let text = fs::read_to_string(path).map_err(|e| input_err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| input_err(e.to_string()))
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("outputs always serialize");
    text.push('\n');
    write_text(&text, out)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    let output_err = |path: &str, e: std::io::Error| CliError::Output {
        path: path.to_string(),
        msg: e.to_string(),
    };
    match out {
        Some(path) => fs::write(path, text).map_err(|e| output_err(&path.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| output_err("<stdout>", e)),
    }
}

fn ma_solve(a: &SolveArgs) -> Result<i32, CliError> {
    if let Some(path) = &a.single {
        let inst: SingleTargetInstance = read_json(path)?;
        let k = solve_single_target(&inst)?;
        let size = k.len();
        write_json(&SingleTargetOutput { k, size }, a.output.as_deref())?;
        return Ok(0);
    }
    let path = a
        .multi
        .as_ref()
        .expect("clap enforces one of --single/--multi");
    let inst: MAInstance = read_json(path)?;
    let (solver, sol) = if a.heuristic {
        ("heuristic", heuristic_multi_target(&inst)?)
    } else {
        ("exact", solve_multi_target_exact(&inst, a.node_budget)?)
    };
    let tx = sol.tx_count();
    let out = MultiTargetOutput::new(solver, sol.m, tx, bounds(&inst));
    write_json(&out, a.output.as_deref())?;
    Ok(0)
}

fn ma_reduce(a: &ReduceArgs) -> Result<i32, CliError> {
    let p: PartitionInstance = read_json(&a.input)?;
    let instance = partition_to_ma(&p)?;
    let out = ReduceOutput {
        instance,
        has_partition: has_partition(&p),
    };
    write_json(&out, a.output.as_deref())?;
    Ok(0)
}

fn verdict_exit(verdict: &Verdict) -> i32 {
    if verdict.is_pass() {
        0
    } else {
        1
    }
}

fn scheme_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    if a.impossibility {
        let table: RewardTableFile = read_json(&a.input)?;
        let default_lmax = (table.r.len() as u32).saturating_sub(1);
        let lmax = a.lmax.or(table.lmax).unwrap_or(default_lmax);
        let verdict = impossibility_witness(&table.r, lmax)?;
        write_json(&verdict, a.output.as_deref())?;
        return Ok(verdict_exit(&verdict));
    }

    let source: SchemeSource = read_json(&a.input)?;
    let verdict = match source {
        SchemeSource::Params(scheme) => {
            let mut scheme = *scheme;
            if let Some(l) = a.lmax {
                scheme.lmax = l;
            }
            if let Some(k) = a.kmax {
                scheme.kmax = k;
            }
            let kmax = if a.base_case { 1 } else { scheme.kmax };
            scheme.validate()?;
            let t = materialize(&scheme, scheme.lmax + kmax)?;
            verify(&t, scheme.lmax, kmax)?
        }
        SchemeSource::Tables(t) => {
            let kmax = if a.base_case { 1 } else { a.kmax.unwrap_or(1) };
            let lmax = a.lmax.unwrap_or_else(|| t.len().saturating_sub(kmax));
            verify(&t, lmax, kmax)?
        }
    };
    write_json(&verdict, a.output.as_deref())?;
    Ok(verdict_exit(&verdict))
}

fn scheme_design(a: &DesignArgs) -> Result<i32, CliError> {
    let mut scheme: crate::domain::RewardScheme = read_json(&a.input)?;
    let dist = read_json::<PmfFile>(&a.pmf)?.into_dist();
    scheme.validate()?;
    scheme.t0 = neutral_t0(&scheme, &dist)?;
    let tables = materialize(&scheme, scheme.capacity())?;
    let drift = expected_drift(&tables, &dist)?;
    write_json(
        &DesignOutput {
            scheme,
            expected_drift: drift,
            tables,
        },
        a.output.as_deref(),
    )?;
    Ok(0)
}

fn sim_run(a: &SimArgs) -> Result<i32, CliError> {
    let file: SimFile = read_json(&a.input)?;
    let scheme = match file.scheme {
        SchemeSource::Params(s) => {
            s.validate()?;
            materialize(&s, s.capacity())?
        }
        SchemeSource::Tables(t) => t,
    };
    let config = SimConfig {
        scheme,
        dist: file.length_pmf,
        messages: file.messages,
        attack: file.attacks,
        seed: a.seed.unwrap_or(file.seed),
        pool_size: file.pool_size.unwrap_or(DEFAULT_POOL_SIZE),
    };
    let report = simulate(&config)?;

    if let Some(path) = &a.trace {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Output {
            path: path.display().to_string(),
            msg: e.to_string(),
        };
        w.write_record(["message_index", "total"])
            .map_err(csv_err)?;
        for p in &report.supply_trace {
            w.write_record([p.message_index.to_string(), p.total.to_string()])
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        fs::write(path, bytes).map_err(|e| CliError::Output {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
    }
    write_json(&report, a.output.as_deref())?;
    Ok(0)
}
