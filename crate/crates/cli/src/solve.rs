use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::ValueEnum;

use schelling_core::decomposition::{decompose_ranked, make_nice, seeded_rank, NiceTreeDecomposition, Strategy};
use schelling_core::dp::{solve_perfect, solve_wo};
use schelling_core::formats::{parse_instance, parse_td, AssignmentFile};
use schelling_core::oracle::Oracle;
use schelling_core::{kernel, perfect_xp, Assignment, Rational, SchellingInstance};

use crate::{emit, oracle_from_env, read, Status, TdStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Oracle,
    Dp,
    Kernel,
    PerfectXp,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    Wo,
    Perfect,
}

#[derive(clap::Args)]
pub struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Dp)]
    alg: Algorithm,
    #[arg(long, value_enum, default_value_t = Goal::Wo)]
    notion: Goal,
    #[arg(long, value_enum, default_value_t = TdStrategy::MinFill)]
    td_strategy: TdStrategy,
    /// Use this PACE .td decomposition instead of computing one.
    #[arg(long)]
    td_file: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seeds tie-breaking in the decomposition heuristics.
    #[arg(long)]
    seed: Option<u64>,
}

/// Where the decomposition for the dynamic program comes from.
pub struct TdSource {
    pub strategy: Strategy,
    pub seed: Option<u64>,
    pub file: Option<String>,
}

pub struct Report {
    pub assignment: Option<Assignment>,
    pub sw: Option<Rational>,
    pub width: Option<usize>,
    pub table_peak: Option<usize>,
}

fn nice_decomposition(instance: &SchellingInstance, td: &TdSource) -> Result<NiceTreeDecomposition> {
    let graph = instance.graph();
    let decomposition = match &td.file {
        Some(text) => {
            let file = parse_td(text)?;
            if file.vertex_count != graph.vertex_count() {
                bail!("decomposition covers {} vertices, instance has {}", file.vertex_count, graph.vertex_count());
            }
            file.decomposition
        }
        None => {
            let rank = td.seed.map(|s| seeded_rank(graph.vertex_count(), s));
            decompose_ranked(graph, td.strategy, rank.as_deref())?
        }
    };
    Ok(make_nice(graph, &decomposition)?)
}

pub fn run_solver(
    instance: &SchellingInstance,
    alg: Algorithm,
    goal: Goal,
    td: &TdSource,
    oracle: &Oracle,
) -> Result<Report> {
    let two_types = instance.num_types() == 2;
    let mut report = Report { assignment: None, sw: None, width: None, table_peak: None };
    match (alg, goal) {
        (Algorithm::Oracle, Goal::Wo) => {
            let (sw, a) = oracle.max_social_welfare(instance)?;
            report.sw = Some(sw);
            report.assignment = Some(a);
        }
        (Algorithm::Oracle, Goal::Perfect) => report.assignment = oracle.perfect_exists(instance)?,
        (Algorithm::Dp, Goal::Wo) => {
            let sol = solve_wo(instance, &nice_decomposition(instance, td)?)?;
            report.sw = Some(sol.social_welfare);
            report.assignment = Some(sol.assignment);
            report.width = Some(sol.stats.width);
            report.table_peak = Some(sol.stats.peak_table);
        }
        (Algorithm::Dp, Goal::Perfect) => {
            let (w, stats) = solve_perfect(instance, &nice_decomposition(instance, td)?)?;
            report.assignment = w;
            report.width = Some(stats.width);
            report.table_peak = Some(stats.peak_table);
        }
        (Algorithm::Kernel, Goal::Wo) if two_types => {
            let (sw, a, _) = kernel::solve(instance, oracle)?;
            report.sw = Some(sw);
            report.assignment = Some(a);
        }
        (Algorithm::PerfectXp, Goal::Perfect) if two_types => report.assignment = perfect_xp::solve(instance)?.witness,
        (Algorithm::Kernel, Goal::Perfect) => bail!("kernel solves welfare only; use --notion wo"),
        (Algorithm::PerfectXp, Goal::Wo) => bail!("perfect-xp decides perfect assignments only; use --notion perfect"),
        (alg, _) => bail!("{alg} needs exactly 2 types, instance has {}", instance.num_types()),
    }
    if report.sw.is_none() {
        if let Some(a) = &report.assignment {
            report.sw = Some(schelling_core::model::profile(instance, a)?.sw_total);
        }
    }
    Ok(report)
}

pub fn run(args: &SolveArgs) -> Result<Status> {
    let (instance, _) = parse_instance(&read(&args.input)?)?;
    let td = TdSource {
        strategy: args.td_strategy.into(),
        seed: args.seed,
        file: args.td_file.as_deref().map(read).transpose()?,
    };
    let oracle = oracle_from_env()?;
    let report = run_solver(&instance, args.alg, args.notion, &td, &oracle)?;
    if let (Some(w), Some(peak)) = (report.width, report.table_peak) {
        eprintln!("decomposition width {w}, largest table {peak}");
    }
    match report.assignment {
        Some(a) => {
            emit(args.output.as_deref(), &AssignmentFile::new(&instance, &a)?.to_canonical_string())?;
            Ok(Status::Found)
        }
        None => {
            eprintln!("no perfect assignment exists");
            Ok(Status::Negative)
        }
    }
}
