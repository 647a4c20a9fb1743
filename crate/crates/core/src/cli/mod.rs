//! Command-line front end: `run` executes the checks of a scenario file,
//! `suite` runs the seeded acceptance suites.
//!
//! Exit status is 0 when everything passes, 1 on a failed or errored check,
//! 2 on usage and parse errors.

pub mod checks;
pub mod report;
pub mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::Result;
use crate::suites;
pub use report::{CheckReport, Report, Status};
pub use scenario::{Overrides, Scenario, CHECK_KINDS};

#[derive(Debug, Parser)]
#[command(name = "dirac-quant", version, about = "Exact checks for quantized Dirac families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the checks listed in a scenario file.
    Run(RunArgs),
    /// Run the seeded acceptance suites.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = suites::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Record wall time per check (makes reports non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub scenario: PathBuf,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub hbar_order: Option<usize>,
    /// Polynomial degree bound of the quantizer's candidate space.
    #[arg(long)]
    pub degree_bound: Option<u32>,
    /// Derivative order bound of the quantizer's candidate space.
    #[arg(long)]
    pub order_bound: Option<u32>,
    /// Subdivisions per axis of the denominator and rank validation grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Only run checks of this kind; repeatable.
    #[arg(long = "check", value_parser = clap::builder::PossibleValuesParser::new(CHECK_KINDS))]
    pub checks: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub common: Common,
    /// Only run this criterion (1-8); repeatable.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
    pub criterion: Vec<u8>,
}

/// Options of one scenario run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub overrides: Overrides,
    pub kinds: Vec<String>,
    pub timing: bool,
}

/// Loads a scenario and runs its selected checks on the current rayon pool.
pub fn run_scenario(src: &str, opts: &RunOptions) -> Result<Report> {
    let sc = Scenario::parse(src, &opts.overrides)?;
    let selected: Vec<_> =
        sc.checks.iter().filter(|c| opts.kinds.is_empty() || opts.kinds.iter().any(|k| k == c.kind())).collect();
    let checks = selected
        .par_iter()
        .map(|spec| {
            let start = Instant::now();
            let outcome = checks::run_check(&sc, spec, opts.seed);
            let ms = opts.timing.then(|| start.elapsed().as_millis() as u64);
            CheckReport::new(spec.name(), spec.kind(), outcome, ms)
        })
        .collect();
    Ok(Report::new(sc.name.clone(), opts.seed, sc.order, sc.grid, checks))
}

fn pool(jobs: Option<usize>) -> std::result::Result<rayon::ThreadPool, String> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err("--jobs must be at least 1".into());
        }
        b = b.num_threads(j);
    }
    b.build().map_err(|e| e.to_string())
}

/// Runs a parsed command line, writing the report to `out` and diagnostics
/// to `err`. Returns the exit status.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Run(args) => {
            let pool = match pool(args.common.jobs) {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            };
            let src = match std::fs::read_to_string(&args.scenario) {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot read {}: {e}", args.scenario.display());
                    return 2;
                }
            };
            let opts = RunOptions {
                seed: args.common.seed,
                overrides: Overrides {
                    hbar_order: args.hbar_order,
                    bounds: (args.degree_bound, args.order_bound),
                    grid: args.grid,
                },
                kinds: args.checks,
                timing: args.common.timing,
            };
            match pool.install(|| run_scenario(&src, &opts)) {
                Ok(report) => {
                    let text = match args.common.format {
                        Format::Text => report.to_text(),
                        Format::Json => report.to_json() + "\n",
                    };
                    let _ = out.write_all(text.as_bytes());
                    if report.passed {
                        0
                    } else {
                        1
                    }
                }
                Err(e) => {
                    let _ = writeln!(err, "{}: {e}", args.scenario.display());
                    2
                }
            }
        }
        Command::Suite(args) => {
            let pool = match pool(args.common.jobs) {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            };
            let seed = args.common.seed;
            let wanted = |id: u8| args.criterion.is_empty() || args.criterion.contains(&id);
            let report = pool.install(|| {
                let ids: Vec<u8> = (1..=7).filter(|&id| wanted(id)).collect();
                let run = || suites::SuiteReport {
                    seed,
                    criteria: ids.par_iter().map(|&id| suites::criterion(id, seed)).collect(),
                };
                let first = run();
                let mut report = first.clone();
                if wanted(8) {
                    report.criteria.push(suites::determinism(&first, &run()));
                }
                report
            });
            let text = match args.common.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => {
                    let mut t = String::new();
                    for c in &report.criteria {
                        let verdict = if c.passed { "PASS" } else { "FAIL" };
                        t += &format!("{verdict:<5} criterion {} {} ({} cases)\n", c.id, c.title, c.cases);
                        for f in &c.failures {
                            t += &format!("      {f}\n");
                        }
                    }
                    t
                }
            };
            let _ = out.write_all(text.as_bytes());
            if report.passed() {
                0
            } else {
                1
            }
        }
    }
}
