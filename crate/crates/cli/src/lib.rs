//! Command-line front end for `rankaudit`.
//!
//! Each subcommand loads a CSV matrix and a TOML config, runs one audit and
//! writes a JSON [`AuditReport`]. Verdicts reach scripts through the exit
//! code only:
//!
//! | code | meaning                        |
//! |------|--------------------------------|
//! | 0    | audit ran and passed           |
//! | 3    | audit ran and failed           |
//! | 1    | bad input (files, flags)       |
//! | 2    | runtime error during the audit |

pub mod input;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use rankaudit::rank_invariant::{rrt1_verdict, run_rrt1};
use rankaudit::transitivity::{run_rrt2, run_rrt3};
use rankaudit::{CycleStrategy, Decider, DecisionMatrix, Rrt1Config};
use thiserror::Error;

pub use input::{load_problem, InputError, MethodName, ProblemConfig, TieBreakConfig};
pub use report::{AuditReport, Parameters, TestKind, Verdict};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_FAIL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rankaudit",
    version,
    about = "Rank reversal audits for MCDA methods"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank the alternatives with the configured pipeline.
    Eval(Common),
    /// Stability of the best alternative under degradation of the others.
    Rrt1 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        allow_missing: bool,
    },
    /// Transitivity of the pairwise decomposition.
    Rrt2(Common),
    /// Consistency of the ranking recomposed from pairwise results.
    Rrt3 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        candidates: usize,
        #[arg(long, default_value = "random")]
        strategy: CycleStrategy,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn ranking_summary(rank: &rankaudit::RankResult) -> String {
    rank.alternatives()
        .iter()
        .zip(rank.values())
        .map(|(a, v)| format!("{a}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn eval(
    dm: &DecisionMatrix<f64>,
    config: &ProblemConfig,
    seed: u64,
) -> Result<AuditReport, CliError> {
    let rank = config.pipeline().evaluate(dm).map_err(runtime)?;
    let mut report = AuditReport::new(TestKind::Eval, seed, dm, config, Parameters::default());
    report.add_verdict("eval", true, ranking_summary(&rank));
    report.eval = Some(rank);
    Ok(report)
}

fn rrt1(
    dm: &DecisionMatrix<f64>,
    config: &ProblemConfig,
    seed: u64,
    repeats: usize,
    allow_missing: bool,
) -> Result<AuditReport, CliError> {
    let rrt1_config = Rrt1Config {
        repeats,
        seed,
        allow_missing,
        ..Rrt1Config::default()
    };
    let rankings = run_rrt1(&config.pipeline(), dm, &rrt1_config).map_err(runtime)?;
    let verdict = rrt1_verdict(&rankings).map_err(runtime)?;
    let parameters = Parameters {
        repeats: Some(repeats),
        allow_missing: Some(allow_missing),
        ..Parameters::default()
    };
    let mut report = AuditReport::new(TestKind::Rrt1, seed, dm, config, parameters);
    let failed = verdict.mutations.iter().filter(|m| !m.passed).count();
    report.add_verdict(
        "rrt1",
        verdict.passed,
        format!(
            "pass_rate={:.4} ({} mutations, {failed} failed)",
            verdict.pass_rate,
            verdict.mutations.len()
        ),
    );
    report.rrt1 = Some(report::Rrt1Section {
        rank_table: rankings.to_rank_table(),
        rankings,
        verdict,
    });
    Ok(report)
}

fn rrt2(
    dm: &DecisionMatrix<f64>,
    config: &ProblemConfig,
    seed: u64,
) -> Result<AuditReport, CliError> {
    let out = run_rrt2(&config.pipeline(), dm, &config.tie_policy()).map_err(runtime)?;
    let mut report = AuditReport::new(TestKind::Rrt2, seed, dm, config, Parameters::default());
    report.add_verdict(
        "rrt2",
        out.report.test_criterion_2,
        format!(
            "trans_break_rate={} ({} cycles)",
            out.report.rate_exact(),
            out.report.trans_break.len()
        ),
    );
    report.rrt2 = Some(out);
    Ok(report)
}

fn rrt3(
    dm: &DecisionMatrix<f64>,
    config: &ProblemConfig,
    seed: u64,
    candidates: usize,
    strategy: CycleStrategy,
) -> Result<AuditReport, CliError> {
    let out = run_rrt3(
        &config.pipeline(),
        dm,
        &config.tie_policy(),
        candidates,
        strategy,
        seed,
    )
    .map_err(runtime)?;
    let parameters = Parameters {
        candidates: Some(candidates),
        strategy: Some(strategy),
        ..Parameters::default()
    };
    let mut report = AuditReport::new(TestKind::Rrt3, seed, dm, config, parameters);
    report.add_verdict(
        "rrt3.transitivity",
        out.test_criterion_2,
        format!("{} cycles", out.transitivity.trans_break.len()),
    );
    report.add_verdict(
        "rrt3.recomposition",
        out.test_criterion_3,
        format!("{} recomposed ranking(s)", out.comparator.len() - 1),
    );
    report.rrt3 = Some(out);
    Ok(report)
}

/// Runs one parsed command and returns the report, without writing it.
pub fn execute(command: &Command) -> Result<(AuditReport, &Path), CliError> {
    let common = match command {
        Command::Eval(c) | Command::Rrt2(c) => c,
        Command::Rrt1 { common, .. } | Command::Rrt3 { common, .. } => common,
    };
    let (dm, config) = load_problem(&common.matrix, &common.config)?;
    let seed = common.seed;
    let report = match command {
        Command::Eval(_) => eval(&dm, &config, seed)?,
        Command::Rrt1 {
            repeats,
            allow_missing,
            ..
        } => rrt1(&dm, &config, seed, *repeats, *allow_missing)?,
        Command::Rrt2(_) => rrt2(&dm, &config, seed)?,
        Command::Rrt3 {
            candidates,
            strategy,
            ..
        } => rrt3(&dm, &config, seed, *candidates, *strategy)?,
    };
    Ok((report, &common.out))
}

fn write_report(report: &AuditReport, out: &Path) -> Result<(), CliError> {
    let json = report.to_json().map_err(runtime)?;
    std::fs::write(out, json)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", out.display())))
}

/// Parses `args`, runs the command, writes the report and returns the
/// process exit code. Summary lines go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_PASS;
        }
    };
    let result = execute(&cli.command).and_then(|(report, out)| {
        write_report(&report, out)?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            for v in &report.verdicts {
                let _ = writeln!(stdout, "{v}");
            }
            if report.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
