mod bench;
mod generate;
mod solve;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use schelling_core::decomposition::Strategy;
use schelling_core::oracle::{Oracle, DEFAULT_BUDGET};
use schelling_core::Notion;

pub const BUDGET_ENV: &str = "SCHELLING_ORACLE_BUDGET";

#[derive(Parser)]
#[command(name = "schelling", version, about = "Exact solvers and verifiers for Schelling assignments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an optimal or perfect assignment.
    Solve(solve::SolveArgs),
    /// Check an assignment against an optimality notion.
    Verify(VerifyArgs),
    /// Write an instance built by a reduction or at random.
    Generate(generate::GenerateArgs),
    /// Run a suite of instances and algorithms, writing CSV.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TdStrategy {
    #[value(name = "min_fill", alias = "min-fill")]
    MinFill,
    #[value(name = "min_degree", alias = "min-degree")]
    MinDegree,
    #[value(name = "exact_small", alias = "exact-small")]
    ExactSmall,
}

impl From<TdStrategy> for Strategy {
    fn from(s: TdStrategy) -> Strategy {
        match s {
            TdStrategy::MinFill => Strategy::MinFill,
            TdStrategy::MinDegree => Strategy::MinDegree,
            TdStrategy::ExactSmall => Strategy::ExactSmall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NotionArg {
    Wo,
    Po,
    Gwo,
    Uvo,
    Perfect,
}

impl From<NotionArg> for Notion {
    fn from(n: NotionArg) -> Notion {
        match n {
            NotionArg::Wo => Notion::Wo,
            NotionArg::Po => Notion::Po,
            NotionArg::Gwo => Notion::Gwo,
            NotionArg::Uvo => Notion::Uvo,
            NotionArg::Perfect => Notion::Perfect,
        }
    }
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long, value_enum)]
    notion: NotionArg,
}

/// Process outcome: the exit code contract is 0 found, 2 decided negative, 1 error.
pub enum Status {
    Found,
    Negative,
}

pub fn oracle_from_env() -> Result<Oracle> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => {
            let budget: u128 = v.trim().parse().with_context(|| format!("{BUDGET_ENV}={v:?} is not an integer"))?;
            Ok(Oracle::with_budget(budget))
        }
        Err(_) => Ok(Oracle::with_budget(DEFAULT_BUDGET)),
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("cannot write {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn verify(args: &VerifyArgs) -> Result<Status> {
    use schelling_core::formats::{parse_assignment, parse_instance, AssignmentFile};
    let (instance, names) = parse_instance(&read(&args.input)?)?;
    let assignment = parse_assignment(&read(&args.assignment)?, &instance, names.as_deref())?;
    let notion = Notion::from(args.notion);
    let oracle = oracle_from_env()?;
    let counterexample = oracle.counterexample(&instance, &assignment, notion).map_err(|e| match e {
        schelling_core::Error::BudgetExceeded { .. } => {
            anyhow::anyhow!("{e}; set {BUDGET_ENV} to raise it (checking perfect never needs the budget)")
        }
        e => e.into(),
    })?;
    match counterexample {
        None => {
            println!("PASS {notion}");
            Ok(Status::Found)
        }
        Some(c) => {
            println!("FAIL {notion}");
            if notion != Notion::Perfect {
                println!("{}", AssignmentFile::new(&instance, &c)?.to_canonical_string());
            }
            Ok(Status::Negative)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve::run(args),
        Command::Verify(args) => verify(args),
        Command::Generate(args) => generate::run(args),
        Command::Bench(args) => bench::run(args),
    };
    match result {
        Ok(Status::Found) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
