use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Deserialize;

use schelling_core::decomposition::Strategy;
use schelling_core::formats::parse_instance;

use crate::solve::{run_solver, Algorithm, Goal, TdSource};
use crate::{oracle_from_env, read, Status};

#[derive(clap::Args)]
pub struct BenchArgs {
    /// Suite JSON: {"instances": [paths], "algorithms": [...], "notion"?, "td_strategy"?}.
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Rows run in parallel; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Suite {
    #[serde(default)]
    instances: Vec<String>,
    #[serde(default)]
    algorithms: Vec<Algorithm>,
    #[serde(default = "default_goal")]
    notion: Goal,
    #[serde(default)]
    td_strategy: Option<String>,
}

fn default_goal() -> Goal {
    Goal::Wo
}

struct Row {
    instance: String,
    algorithm: Algorithm,
    width: String,
    peak: String,
    sw: String,
    wall_ms: String,
}

fn run_row(base: &Path, instance: &str, alg: Algorithm, goal: Goal, strategy: Strategy) -> Row {
    let start = Instant::now();
    let outcome = (|| -> Result<_> {
        let (inst, _) = parse_instance(&read(&base.join(instance))?)?;
        let td = TdSource { strategy, seed: None, file: None };
        run_solver(&inst, alg, goal, &td, &oracle_from_env()?)
    })();
    let wall_ms = format!("{:.3}", start.elapsed().as_secs_f64() * 1000.0);
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    match outcome {
        Ok(r) => Row {
            instance: instance.to_string(),
            algorithm: alg,
            width: opt(r.width),
            peak: opt(r.table_peak),
            sw: r.sw.map_or_else(|| "none".to_string(), |s| s.to_string()),
            wall_ms,
        },
        Err(e) => Row {
            instance: instance.to_string(),
            algorithm: alg,
            width: String::new(),
            peak: String::new(),
            sw: format!("error: {e:#}"),
            wall_ms,
        },
    }
}

pub fn run(args: &BenchArgs) -> Result<Status> {
    let text = read(&args.suite)?;
    let suite: Suite = serde_json::from_str(&text).context("malformed suite file")?;
    let strategy: Strategy = suite.td_strategy.as_deref().unwrap_or("min_fill").parse()?;
    let base = args.suite.parent().map(Path::to_path_buf).unwrap_or_default();
    let jobs: Vec<(&String, Algorithm)> =
        suite.instances.iter().flat_map(|i| suite.algorithms.iter().map(move |&a| (i, a))).collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build()?;
    let rows: Vec<Row> =
        pool.install(|| jobs.par_iter().map(|&(i, a)| run_row(&base, i, a, suite.notion, strategy)).collect());

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["instance", "algorithm", "width_used", "table_peak", "sw", "wall_ms"])?;
    for r in &rows {
        writer.write_record([&r.instance, &r.algorithm.to_string(), &r.width, &r.peak, &r.sw, &r.wall_ms])?;
    }
    let bytes = writer.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?;
    let csv_text = String::from_utf8(bytes)?;
    match &args.output {
        Some(p) => std::fs::write(p, &csv_text).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{csv_text}"),
    }
    Ok(Status::Found)
}
