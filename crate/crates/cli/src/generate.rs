use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use schelling_core::formats::{parse_edge_list, parse_sizes, write_instance};
use schelling_core::graph::Graph;
use schelling_core::reductions::{
    from_biclique, from_binpacking, from_clique, from_minbisection, random_instance, EdgeModel, Family, ReductionOutput,
};

use crate::{emit, read, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reduction {
    Clique,
    Biclique,
    Minbisection,
    Binpacking,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Path,
    Clique,
}

#[derive(clap::Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    reduction: Reduction,
    /// Source graph as an edge list (clique, biclique, minbisection).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Clique or biclique size.
    #[arg(long)]
    k: Option<usize>,
    /// Number of left-side vertices (biclique); they are vertices 0..left.
    #[arg(long)]
    left: Option<usize>,
    /// Bisection cut bound (minbisection).
    #[arg(long)]
    cut: Option<usize>,
    /// Item sizes such as "2,2,4" (binpacking).
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    capacity: Option<usize>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Path)]
    family: FamilyArg,
    /// Join every path to an extra hub vertex (binpacking).
    #[arg(long)]
    tree: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long, conflicts_with = "max_degree")]
    edge_prob: Option<f64>,
    #[arg(long)]
    max_degree: Option<usize>,
    /// Agents per type such as "3,2" (random).
    #[arg(long)]
    type_counts: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the reduction's claim and source metadata here.
    #[arg(long)]
    emit_claim: Option<PathBuf>,
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Result<T> {
    value.with_context(|| format!("--{flag} is required for this reduction"))
}

fn source_graph(args: &GenerateArgs) -> Result<Graph> {
    let path = args.graph.as_deref().context("--graph is required for this reduction")?;
    Ok(parse_edge_list(&read(path)?)?)
}

fn reduce(args: &GenerateArgs) -> Result<ReductionOutput> {
    Ok(match args.reduction {
        Reduction::Clique => from_clique(&source_graph(args)?, need(args.k, "k")?)?,
        Reduction::Biclique => from_biclique(&source_graph(args)?, need(args.left, "left")?, need(args.k, "k")?)?,
        Reduction::Minbisection => from_minbisection(&source_graph(args)?, need(args.cut, "cut")?)?,
        Reduction::Binpacking => {
            let sizes = parse_sizes(args.sizes.as_deref().context("--sizes is required for binpacking")?)?;
            let family = match args.family {
                FamilyArg::Path => Family::Path,
                FamilyArg::Clique => Family::Clique,
            };
            from_binpacking(&sizes, need(args.bins, "bins")?, need(args.capacity, "capacity")?, family, args.tree)?
        }
        Reduction::Random => unreachable!("handled by the caller"),
    })
}

pub fn run(args: &GenerateArgs) -> Result<Status> {
    if args.reduction == Reduction::Random {
        if args.emit_claim.is_some() {
            bail!("random instances carry no claim");
        }
        let model = match (args.edge_prob, args.max_degree) {
            (Some(p), None) => EdgeModel::Probability(p),
            (None, Some(d)) => EdgeModel::DegreeBound(d),
            _ => bail!("random needs --edge-prob or --max-degree"),
        };
        let counts = parse_sizes(args.type_counts.as_deref().context("--type-counts is required for random")?)?;
        let instance = random_instance(args.seed, need(args.vertices, "vertices")?, model, counts)?;
        emit(args.output.as_deref(), &write_instance(&instance, None))?;
        return Ok(Status::Found);
    }
    let out = reduce(args)?;
    emit(args.output.as_deref(), &write_instance(&out.instance, None))?;
    if let Some(path) = &args.emit_claim {
        let doc = serde_json::json!({ "claim": out.claim, "metadata": out.metadata });
        emit(Some(path), &serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(Status::Found)
}
