//! Command-line front end: worked-example check, CoMP sweep, randomized
//! self-test and the incremental-vs-recompute benchmark.

pub mod bench;
pub mod config;
pub mod output;
pub mod selftest;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ircgain::comp::{run_sweep, ScenarioConfig};

use crate::config::{ConfigError, Origin};
use crate::output::Format;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "ircgain", version, about = "IRC-SINR gain from added receive antennas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the embedded 5-antenna worked example.
    VerifyExample,
    /// Run the single-cell vs. multi-cell SIR sweep.
    Sweep(SweepArgs),
    /// Run the randomized property suites.
    Selftest(SelftestArgs),
    /// Time the incremental chain against full recomputation.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Default)]
pub struct SweepArgs {
    /// Scenario file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the scenario seed (default 42).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Comma-separated SIR points in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub sir_list: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// `key=value` override of a scenario field; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Trials per suite.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Re-run a single `SUITE:TRIAL` instance and print its inputs.
    #[arg(long)]
    pub replay: Option<selftest::ReplayTarget>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated `N_R:A:Z` entries.
    #[arg(long, default_value = bench::DEFAULT_GRID)]
    pub grid: String,
    #[arg(long, default_value_t = 200)]
    pub reps: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Resolves the scenario: defaults, then the config file, then `--set`
/// overrides, then the dedicated flags.
pub fn resolve_scenario(args: &SweepArgs) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig {
        seed: DEFAULT_SEED,
        ..ScenarioConfig::default()
    };
    if let Some(path) = &args.config {
        config::apply_file(&mut cfg, path)?;
    }
    for o in &args.overrides {
        let (k, v) = config::split_pair(o, Origin::Override)?;
        config::apply(&mut cfg, &k, &v, &Origin::Override)?;
    }
    if let Some(list) = &args.sir_list {
        config::apply(&mut cfg, "sir_points_db", list, &Origin::Override)?;
    }
    if let Some(n) = args.iterations {
        cfg.iterations = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn cmd_verify_example() -> ExitCode {
    match verify::verify_embedded(&verify::Expectations::published()) {
        Ok(report) => {
            print!("{}", report.render(ircgain::golden::EXAMPLE_BASE_ANTENNAS));
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("verify-example: mismatch against published values");
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("verify-example: {e}");
            ExitCode::FAILURE
        }
    }
}

fn write_sweep(args: &SweepArgs) -> Result<(), String> {
    let cfg = resolve_scenario(args).map_err(|e| e.to_string())?;
    let rows = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match args.format {
        Format::Csv => output::write_csv(&rows, &mut sink).map_err(|e| e.to_string())?,
        Format::Json => output::write_json(&cfg, &rows, &mut sink).map_err(|e| e.to_string())?,
    }
    sink.flush().map_err(|e| e.to_string())
}

fn cmd_sweep(args: &SweepArgs) -> ExitCode {
    match write_sweep(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sweep: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_selftest(args: &SelftestArgs) -> ExitCode {
    let tol = selftest::Tolerances::default();
    if let Some(target) = args.replay {
        let out = selftest::run_trial(target.suite, args.seed, target.trial, &tol);
        println!(
            "suite={} seed={} trial={} {} = {:.6e} {}",
            target.suite,
            args.seed,
            target.trial,
            target.suite.metric_label(),
            out.metric,
            if out.passed { "PASS" } else { "FAIL" }
        );
        println!("{}", out.instance);
        return if out.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE };
    }
    let summaries = selftest::run_all(args.seed, args.trials, &tol);
    let text = selftest::render_summary(&summaries, args.seed);
    if summaries.iter().all(|s| s.failures == 0) {
        print!("{text}");
        ExitCode::SUCCESS
    } else {
        print!("{text}");
        eprintln!("selftest: property violations found");
        ExitCode::FAILURE
    }
}

fn cmd_bench(args: &BenchArgs) -> ExitCode {
    let grid = match bench::parse_grid(&args.grid) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("bench: {e}");
            return ExitCode::FAILURE;
        }
    };
    match bench::run(&grid, args.reps.max(1), args.seed) {
        Ok(rows) => {
            print!("{}", bench::render(&rows));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn run(cli: Cli) -> ExitCode {
    match &cli.command {
        Command::VerifyExample => cmd_verify_example(),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Selftest(args) => cmd_selftest(args),
        Command::Bench(args) => cmd_bench(args),
    }
}
