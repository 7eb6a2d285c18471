//! Command-line front end.

pub mod document;
pub mod instance_file;
pub mod psi;
pub mod report;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use log::warn;
use thiserror::Error;

use crate::inverse::{self, SolveResult};
use crate::numeric::{self, Ext, Rational};
use crate::oracle::{self, OracleError, OracleInverse};
use crate::subproblem::{big_delta, InverseInstance, ValidationError};

pub use document::ParseError;
pub use instance_file::{InstanceFile, Kind};
pub use psi::{PsiRow, PsiTable};
pub use report::{SolutionReport, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "riov", version, about = "Restricted inverse optimal value solver for network LPs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write a report.
    Solve {
        file: PathBuf,
        /// Report destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Cross-check against the brute-force oracle.
        #[arg(long, hide = true)]
        verify: bool,
    },
    /// Sample ψ(z) into a CSV file.
    Psi {
        file: PathBuf,
        #[arg(short = 'n', long, value_parser = clap::value_parser!(u32).range(2..))]
        samples: u32,
        #[arg(short, long)]
        output: PathBuf,
        /// Sampling range, needed when a break point is infinite.
        #[arg(long, num_args = 2, value_names = ["LOW", "HIGH"], allow_hyphen_values = true)]
        range: Option<Vec<String>>,
    },
    /// Check an instance and print its index sets.
    Validate { file: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: invalid instance: {source}", path.display())]
    Invalid { path: PathBuf, source: ValidationError },
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verify(String),
}

pub fn load(path: &Path) -> Result<(InstanceFile, InverseInstance), CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let file = InstanceFile::parse(&text).map_err(|source| CliError::Parse { path: path.into(), source })?;
    let inst = file.build().map_err(|source| CliError::Invalid { path: path.into(), source })?;
    Ok((file, inst))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Compares a solve against the enumeration oracle. Instances past the
/// oracle cap are skipped with a warning.
pub fn verify(inst: &InverseInstance, result: &SolveResult) -> Result<(), CliError> {
    let slow = match oracle::oracle_inverse(inst) {
        Ok(s) => s,
        Err(e @ OracleError::TooLarge { .. }) => {
            warn!("oracle skipped: {e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Verify(e.to_string())),
    };
    match (result, slow) {
        (SolveResult::Optimal(s), OracleInverse::Optimal { objective, .. }) if s.objective == objective => Ok(()),
        (SolveResult::Infeasible(_), OracleInverse::Infeasible) => Ok(()),
        (_, slow) => Err(CliError::Verify(format!("oracle reports {slow:?}"))),
    }
}

pub fn cmd_solve(path: &Path, output: Option<&Path>, check: bool) -> Result<(SolutionReport, InverseInstance), CliError> {
    let (_, inst) = load(path)?;
    let result = inverse::solve(&inst);
    if check {
        verify(&inst, &result)?;
    }
    let report = SolutionReport::from_result(&result);
    if let Some(out) = output {
        write(out, &report.to_text())?;
    }
    Ok((report, inst))
}

fn parse_range(range: &[String]) -> Result<(Rational, Rational), CliError> {
    let p = |s: &String| numeric::parse(s).map_err(|e| CliError::Usage(format!("--range: {e}")));
    let (lo, hi) = (p(&range[0])?, p(&range[1])?);
    if lo >= hi {
        return Err(CliError::Usage(format!("--range: {lo} is not below {hi}")));
    }
    Ok((lo, hi))
}

pub fn cmd_psi(
    path: &Path,
    samples: usize,
    output: &Path,
    range: Option<(Rational, Rational)>,
) -> Result<PsiTable, CliError> {
    if samples < 2 {
        return Err(CliError::Usage("need at least 2 samples".into()));
    }
    let (_, inst) = load(path)?;
    let breaks = inverse::break_points(&inst);
    let (lo, hi) = match (range, breaks.z_left.finite(), breaks.z_right.finite()) {
        (Some(r), _, _) => r,
        (None, Some(l), Some(r)) => (l.clone(), r.clone()),
        (None, _, _) => {
            return Err(CliError::Usage(format!(
                "break points are [{}, {}]; unbounded break points require --range LOW HIGH",
                breaks.z_left, breaks.z_right
            )))
        }
    };
    let a = Ext::Finite(lo.clone()).max(breaks.z_left.clone());
    let b = Ext::Finite(hi.clone()).min(breaks.z_right.clone());
    let feasible = match (a, b) {
        (Ext::Finite(a), Ext::Finite(b)) if a <= b => Some((a, b)),
        _ => None,
    };
    let table = psi::sample(&inst, &lo, &hi, feasible, samples);
    write(output, &table.to_csv())?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub kind: Kind,
    pub nodes: usize,
    pub vars: usize,
    pub zero_set: Vec<usize>,
    pub support: Vec<usize>,
    pub delta: Rational,
    pub big_delta: Rational,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |v: &[usize]| v.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(",");
        writeln!(f, "valid {} instance: {} nodes, {} variables", self.kind, self.nodes, self.vars)?;
        writeln!(f, "J = {{{}}}", set(&self.zero_set))?;
        writeln!(f, "J_bar = {{{}}}", set(&self.support))?;
        writeln!(f, "delta = {}", self.delta)?;
        writeln!(f, "Delta = {}", self.big_delta)
    }
}

pub fn cmd_validate(path: &Path) -> Result<ValidationReport, CliError> {
    let (file, inst) = load(path)?;
    Ok(ValidationReport {
        kind: file.kind(),
        nodes: inst.node_count(),
        vars: inst.num_vars(),
        zero_set: inst.zero_set(),
        support: inst.support(),
        delta: inverse::delta(&inst),
        big_delta: big_delta(&inst),
    })
}

/// Runs one command, printing to stdout/stderr, and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Solve { file, output, verify } => cmd_solve(&file, output.as_deref(), verify).map(|(report, inst)| {
            let summary = report.summary(inst.costs());
            if output.is_some() {
                print!("{summary}");
            } else {
                print!("{}", report.to_text());
                eprint!("{summary}");
            }
            report.status.exit_code()
        }),
        Command::Psi { file, samples, output, range } => range
            .as_deref()
            .map(parse_range)
            .transpose()
            .and_then(|range| cmd_psi(&file, samples as usize, &output, range))
            .map(|table| {
                println!(
                    "wrote {} rows ({} turning coordinates) to {}",
                    table.rows.len(),
                    table.turning().count(),
                    output.display()
                );
                EXIT_OK
            }),
        Command::Validate { file } => cmd_validate(&file).map(|r| {
            print!("{r}");
            EXIT_OK
        }),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })
}
