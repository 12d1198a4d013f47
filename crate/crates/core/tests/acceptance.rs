//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schelling_core::decomposition::{decompose, make_nice, validate_nice, Strategy, EXACT_MAX_VERTICES};
use schelling_core::dp::{solve_perfect, solve_wo};
use schelling_core::kernel::{self, KernelResult};
use schelling_core::model::{is_perfect, profile};
use schelling_core::oracle::{Oracle, ProfileCatalog};
use schelling_core::reductions::{
    from_biclique, from_binpacking, from_clique, from_minbisection, random_assignment, random_graph, random_tree,
    EdgeModel, Family,
};
use schelling_core::{perfect_xp, Graph, Notion, Rational, SchellingInstance};

struct Outcome {
    pass: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { pass: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into() }
}

fn nice(g: &Graph) -> schelling_core::decomposition::NiceTreeDecomposition {
    make_nice(g, &decompose(g, Strategy::MinFill).unwrap()).unwrap()
}

/// Random type counts with every count at least 1 and total at most `n`.
fn type_counts(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let total = rng.gen_range(k..=n);
    let mut counts = vec![1; k];
    for _ in k..total {
        let i = rng.gen_range(0..k);
        counts[i] += 1;
    }
    counts
}

/// Random instances with at most 10 vertices and at most 3 types.
fn small_corpus() -> Vec<SchellingInstance> {
    let densities = [0.15, 0.3, 0.5, 0.7, 0.9];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..500u64)
        .map(|i| {
            let n = rng.gen_range(2..=10);
            let k = rng.gen_range(1..=3.min(n));
            let counts = type_counts(&mut rng, n, k);
            let p = densities[i as usize % densities.len()];
            SchellingInstance::new(random_graph(1000 + i, n, EdgeModel::Probability(p)).unwrap(), counts).unwrap()
        })
        .collect()
}

/// Every bin-packing output with at most 10 vertices over small inputs.
fn packing_corpus() -> Vec<SchellingInstance> {
    let mut out: Vec<SchellingInstance> = Vec::new();
    for bins in 1..=5usize {
        // Outputs have at least bins * capacity vertices.
        for capacity in 1..=10 / bins {
            let mut items = Vec::new();
            multisets(capacity, bins * capacity, &mut items, &mut |sizes| {
                for (family, tree) in [(Family::Path, false), (Family::Clique, false), (Family::Path, true)] {
                    if let Ok(r) = from_binpacking(sizes, bins, capacity, family, tree) {
                        if r.instance.vertex_count() <= 10 && !out.contains(&r.instance) {
                            out.push(r.instance);
                        }
                    }
                }
            });
        }
    }
    out
}

/// Non-increasing non-empty lists with entries in `1..=max` and sum at most `budget`.
fn multisets(max: usize, budget: usize, prefix: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if !prefix.is_empty() {
        f(prefix);
    }
    let top = prefix.last().copied().unwrap_or(max).min(max).min(budget);
    for s in 1..=top {
        prefix.push(s);
        multisets(max, budget - s, prefix, f);
        prefix.pop();
    }
}

fn oracle_dp_equivalence(corpus: &[SchellingInstance]) -> Outcome {
    let start = Instant::now();
    let oracle = Oracle::default();
    for (i, inst) in corpus.iter().enumerate() {
        let expected = oracle.max_social_welfare(inst).unwrap().0;
        let sol = solve_wo(inst, &nice(inst.graph())).unwrap();
        if sol.social_welfare != expected {
            return fail(format!("instance {i}: dp {} vs oracle {expected}", sol.social_welfare));
        }
        if profile(inst, &sol.assignment).map(|p| p.sw_total).ok() != Some(expected) {
            return fail(format!("instance {i}: witness does not realize {expected}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        return fail(format!("{} instances took {:.1}s", corpus.len(), elapsed.as_secs_f64()));
    }
    pass(format!("{} instances agree exactly in {:.1}s", corpus.len(), elapsed.as_secs_f64()))
}

fn perfect_equivalence(corpus: &[SchellingInstance]) -> Outcome {
    let oracle = Oracle::default();
    for (i, inst) in corpus.iter().enumerate() {
        let expected = oracle.perfect_exists(inst).unwrap().is_some();
        let (witness, _) = solve_perfect(inst, &nice(inst.graph())).unwrap();
        if witness.is_some() != expected {
            return fail(format!("instance {i}: dp says {}, oracle says {expected}", witness.is_some()));
        }
        if let Some(w) = witness {
            if !is_perfect(inst, &w).unwrap() {
                return fail(format!("instance {i}: witness is not perfect"));
            }
        }
    }
    pass(format!("{} instances agree", corpus.len()))
}

fn is_all_ones(catalog: &ProfileCatalog, i: usize) -> bool {
    catalog.entries()[i].profile.sorted_vector.iter().all(Rational::is_one)
}

fn notion_implications(corpus: &[SchellingInstance]) -> Outcome {
    let oracle = Oracle::default();
    let mut perfect_instances = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let catalog = oracle.catalog(inst).unwrap();
        let best = catalog.max_social_welfare();
        let dp = solve_wo(inst, &nice(inst.graph())).unwrap();
        let mut witnesses = vec![profile(inst, &dp.assignment).unwrap()];
        witnesses.extend(catalog.entries().iter().filter(|e| e.profile.sw_total == best).map(|e| e.profile.clone()));
        for w in &witnesses {
            for notion in [Notion::Uvo, Notion::Gwo, Notion::Po] {
                if catalog.dominator_of(w, notion).unwrap().is_some() {
                    return fail(format!("instance {i}: a WO profile is not {notion}"));
                }
            }
        }
        let has_perfect = inst.agent_count() > 0 && (0..catalog.entries().len()).any(|j| is_all_ones(&catalog, j));
        if has_perfect {
            perfect_instances += 1;
            for (j, e) in catalog.entries().iter().enumerate() {
                let po = catalog.dominator_of(&e.profile, Notion::Po).unwrap().is_none();
                if po && !is_all_ones(&catalog, j) {
                    return fail(format!("instance {i}: PO profile that is not perfect"));
                }
            }
        }
    }
    pass(format!("{} instances, {perfect_instances} with a perfect assignment, no violations", corpus.len()))
}

/// Random graph with maximum degree at most `delta`, often disconnected.
fn bounded_graph(seed: u64, n: usize, delta: usize, p: f64) -> Graph {
    let g = random_graph(seed, n, EdgeModel::Probability(p)).unwrap();
    let mut degree = vec![0; n];
    let mut kept = Vec::new();
    for &(u, v) in g.edges() {
        if degree[u] < delta && degree[v] < delta {
            degree[u] += 1;
            degree[v] += 1;
            kept.push((u, v));
        }
    }
    Graph::new(n, kept).unwrap()
}

fn kernel_corpus() -> Vec<SchellingInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
    (0..200u64)
        .map(|i| {
            let n = rng.gen_range(5..=14);
            let delta = rng.gen_range(1..=3);
            let r = rng.gen_range(1..=4);
            let b = rng.gen_range(1..=5 - r);
            let g = if i % 2 == 0 {
                random_graph(5000 + i, n, EdgeModel::DegreeBound(delta)).unwrap()
            } else {
                bounded_graph(5000 + i, n, delta, rng.gen_range(0.05..0.4))
            };
            SchellingInstance::two_types(g, r, b).unwrap()
        })
        .collect()
}

fn kernel_safety(corpus: &[SchellingInstance]) -> Outcome {
    let oracle = Oracle::default();
    let mut pruned = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let (r, b) = (inst.type_counts()[0], inst.type_counts()[1]);
        let delta = inst.graph().max_degree();
        let (sw, a, result) = kernel::solve(inst, &oracle).unwrap();
        if let KernelResult::Kernel { instance, .. } = &result {
            if instance.vertex_count() > kernel::kernel_size_bound(delta, r, b) {
                return fail(format!("instance {i}: kernel has {} vertices", instance.vertex_count()));
            }
            if instance.vertex_count() < inst.vertex_count() {
                pruned += 1;
            }
        }
        let expected = oracle.max_social_welfare(inst).unwrap().0;
        if sw != expected || profile(inst, &a).unwrap().sw_total != expected {
            return fail(format!("instance {i}: kernel {sw} vs oracle {expected}"));
        }
    }
    let cycle = SchellingInstance::two_types(Graph::cycle(40), 2, 2).unwrap();
    let KernelResult::Direct(a) = kernel::kernelize(&cycle).unwrap() else {
        return fail("C40 did not take the direct branch");
    };
    let p = profile(&cycle, &a).unwrap();
    if p.sw_total != Rational::from_integer(4) || !p.sorted_vector.iter().all(Rational::is_one) {
        return fail(format!("C40 direct assignment has SW {}", p.sw_total));
    }
    pass(format!("{} instances exact ({pruned} pruned), C40 direct with SW 4/1", corpus.len()))
}

fn xp_agreement(corpus: &[&SchellingInstance]) -> Outcome {
    let oracle = Oracle::default();
    for (i, inst) in corpus.iter().enumerate() {
        let expected = oracle.perfect_exists(inst).unwrap().is_some();
        let out = perfect_xp::solve(inst).unwrap();
        if out.witness.is_some() != expected {
            return fail(format!("instance {i}: xp says {}, oracle says {expected}", out.witness.is_some()));
        }
        if let Some(w) = &out.witness {
            if !is_perfect(inst, w).unwrap() {
                return fail(format!("instance {i}: witness is not perfect"));
            }
        }
    }
    pass(format!("{} instances agree", corpus.len()))
}

fn bipartite_graphs(left: usize, right: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..left).flat_map(|l| (0..right).map(move |r| (l, left + r))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            Graph::new(left + right, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e))
                .unwrap()
        })
        .collect()
}

fn reduction_checks() -> Outcome {
    let oracle = Oracle::default();
    let mut notes = Vec::new();

    // (a) biclique: all graphs on 2+2, every graph on 3+3.
    let mut checked = 0;
    for (left, right) in [(2, 2), (3, 3)] {
        for h in bipartite_graphs(left, right) {
            let out = from_biclique(&h, left, 2).unwrap();
            if out.check(&oracle).unwrap() != Some(true) {
                return fail(format!("(a) biclique claim fails on {left}+{right} edges {:?}", h.edges()));
            }
            checked += 1;
        }
    }
    notes.push(format!("(a) {checked} biclique sources"));

    // (b) min bisection on K4.
    let out = from_minbisection(&Graph::complete(4), 4).unwrap();
    let catalog = oracle.catalog(&out.instance).unwrap();
    let group_opt = catalog.entries().iter().map(|e| *e.profile.sw_per_type.iter().min().unwrap()).max().unwrap();
    let formula = Rational::from_integer(2) - Rational::new(4, 3);
    if group_opt != Rational::new(2, 3) || group_opt != formula {
        return fail(format!("(b) K4 per-group optimum {group_opt}"));
    }
    for cut in [3, 4] {
        if from_minbisection(&Graph::complete(4), cut).unwrap().check(&oracle).unwrap() != Some(true) {
            return fail(format!("(b) K4 claim fails for cut bound {cut}"));
        }
    }
    notes.push(format!("(b) K4 per-group optimum {group_opt}"));

    // (c) bin packing {2,2,4}, two bins of size 4.
    for tree in [false, true] {
        let out = from_binpacking(&[2, 2, 4], 2, 4, Family::Path, tree).unwrap();
        if oracle.perfect_exists(&out.instance).unwrap().is_none() {
            return fail(format!("(c) no perfect assignment (tree variant: {tree})"));
        }
        if let Some(hub) = out.metadata.hub {
            let mut found = 0;
            for a in oracle.enumerate(&out.instance).unwrap() {
                if is_perfect(&out.instance, &a).unwrap() {
                    found += 1;
                    if a.get(hub).is_some() {
                        return fail("(c) hub occupied in a perfect assignment");
                    }
                }
            }
            let (w, _) = solve_perfect(&out.instance, &nice(out.instance.graph())).unwrap();
            if w.is_none_or(|w| w.get(hub).is_some()) {
                return fail("(c) dp witness missing or occupies the hub");
            }
            notes.push(format!("(c) hub empty in all {found} perfect assignments"));
        }
    }

    // (d) clique on P3 with k = 2.
    let out = from_clique(&Graph::path(3), 2).unwrap();
    let total = oracle.catalog(&out.instance).unwrap().assignment_total();
    if total > 156 || out.check(&oracle).unwrap() != Some(true) {
        return fail(format!("(d) clique claim fails ({total} assignments)"));
    }
    notes.push(format!("(d) PO red vector matches over {total} assignments"));
    pass(notes.join("; "))
}

fn decomposition_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdec0);
    let mut exact_runs = 0;
    for i in 0..100u64 {
        let n = 1 + (i as usize % 50);
        let p = rng.gen_range(0.05..0.6);
        let g = random_graph(9000 + i, n, EdgeModel::Probability(p)).unwrap();
        for s in Strategy::ALL {
            if s == Strategy::ExactSmall && n > EXACT_MAX_VERTICES {
                continue;
            }
            let td = decompose(&g, s).unwrap();
            let ntd = make_nice(&g, &td).unwrap();
            let check = validate_nice(&g, &ntd);
            if !check.valid {
                return fail(format!("graph {i} ({s}): {}", check.diagnostics.join("; ")));
            }
            if ntd.width() != td.width() {
                return fail(format!("graph {i} ({s}): nice form changed width"));
            }
            exact_runs += usize::from(s == Strategy::ExactSmall);
        }
    }
    for seed in 0..10 {
        let t = random_tree(seed, 5 + seed as usize * 4);
        if decompose(&t, Strategy::MinFill).unwrap().width() != 1 {
            return fail(format!("tree {seed} not width 1"));
        }
    }
    for n in 1..=10 {
        for s in Strategy::ALL {
            if decompose(&Graph::complete(n), s).unwrap().width() != n - 1 {
                return fail(format!("K{n} ({s}) wrong width"));
            }
        }
    }
    pass(format!("100 graphs valid under all strategies ({exact_runs} exact runs on graphs up to {EXACT_MAX_VERTICES} vertices); trees width 1; K_n width n-1"))
}

fn scaling_smoke() -> Outcome {
    let inst = SchellingInstance::two_types(random_tree(42, 50), 10, 10).unwrap();
    let start = Instant::now();
    let sol = solve_wo(&inst, &nice(inst.graph())).unwrap();
    let elapsed = start.elapsed();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let best_random =
        (0..1000).map(|_| profile(&inst, &random_assignment(&inst, &mut rng)).unwrap().sw_total).max().unwrap();
    if elapsed > Duration::from_secs(30) {
        return fail(format!("took {:.1}s", elapsed.as_secs_f64()));
    }
    if sol.social_welfare < best_random {
        return fail(format!("dp {} below random {best_random}", sol.social_welfare));
    }
    pass(format!(
        "SW {} >= best random {best_random}, {:.2}s, peak table {}",
        sol.social_welfare,
        elapsed.as_secs_f64(),
        sol.stats.peak_table
    ))
}

fn table_bound(corpus: &[SchellingInstance]) -> Outcome {
    let mut peak = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let stats = solve_wo(inst, &nice(inst.graph())).unwrap().stats;
        let bad = stats.bound_violations(inst.agent_count(), inst.num_types());
        if let Some(&t) = bad.first() {
            return fail(format!("instance {i}: node {t} holds {} classes", stats.table_sizes[t]));
        }
        peak = peak.max(stats.peak_table);
    }
    pass(format!("{} instances within bound, largest table {peak}", corpus.len()))
}

fn main() -> ExitCode {
    let corpus = small_corpus();
    let packing = packing_corpus();
    let kernels = kernel_corpus();
    let mut perfect_corpus = corpus.clone();
    perfect_corpus.extend(packing.iter().cloned());
    let xp_corpus: Vec<&SchellingInstance> = corpus
        .iter()
        .chain(&packing)
        .chain(&kernels)
        .filter(|i| i.num_types() == 2 && i.vertex_count() <= 12 && i.type_counts()[1] <= 3)
        .collect();

    type Criterion<'a> = Box<dyn Fn() -> Outcome + Sync + 'a>;
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("oracle-dp equivalence", Box::new(|| oracle_dp_equivalence(&corpus))),
        ("perfect-mode equivalence", Box::new(|| perfect_equivalence(&perfect_corpus))),
        ("welfare optimality implies the other notions", Box::new(|| notion_implications(&corpus))),
        ("kernel safety", Box::new(|| kernel_safety(&kernels))),
        ("perfect-xp agreement", Box::new(|| xp_agreement(&xp_corpus))),
        ("reduction iff-checks", Box::new(reduction_checks)),
        ("decomposition validity", Box::new(decomposition_validity)),
        ("scaling smoke test", Box::new(scaling_smoke)),
        ("table-size bound", Box::new(|| table_bound(&corpus))),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{status} [{}] {name}: {} ({:.1}s)", i + 1, outcome.detail, start.elapsed().as_secs_f64());
        failures += usize::from(!outcome.pass);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
