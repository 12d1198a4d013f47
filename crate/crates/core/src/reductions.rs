//! Instance generators: hardness constructions from classic graph and
//! packing problems, each paired with a checkable claim, plus seeded random
//! instances for test corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{compare_for_notion, Assignment, Comparison, Notion, SchellingInstance};
use crate::oracle::Oracle;
use crate::rational::Rational;

/// Largest brute-force search run when computing a source answer.
const SOURCE_SEARCH_LIMIT: u128 = 1 << 22;

/// What the generated instance is supposed to satisfy exactly when the
/// source instance is a yes-instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// A perfect assignment exists.
    PerfectExistsIffSource,
    /// Some assignment gives every type welfare at least `threshold`.
    GroupWelfareAtLeast { threshold: Rational },
    /// Every PO assignment gives type 0 exactly this sorted utility vector.
    PoRedVectorEquals { u_po: Vec<Rational> },
}

impl Claim {
    /// Evaluates the instance side of the claim by exhaustive search.
    pub fn evaluate(&self, instance: &SchellingInstance, oracle: &Oracle) -> Result<bool> {
        match self {
            Claim::PerfectExistsIffSource => Ok(oracle.perfect_exists(instance)?.is_some()),
            Claim::GroupWelfareAtLeast { threshold } => {
                let catalog = oracle.catalog(instance)?;
                Ok(catalog.entries().iter().any(|e| e.profile.sw_per_type.iter().all(|sw| sw >= threshold)))
            }
            Claim::PoRedVectorEquals { u_po } => {
                let catalog = oracle.catalog(instance)?;
                let entries = catalog.entries();
                for e in entries {
                    let mut dominated = false;
                    for other in entries {
                        if compare_for_notion(Notion::Po, &other.profile, &e.profile)? == Comparison::ADominates {
                            dominated = true;
                            break;
                        }
                    }
                    if !dominated && e.profile.per_type_sorted[0] != *u_po {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub reduction: String,
    pub source: String,
    /// Brute-force answer to the source problem, when small enough to compute.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_answer: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub item_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity: Option<usize>,
    /// Hub vertex of the tree variant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hub: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub instance: SchellingInstance,
    pub claim: Claim,
    pub metadata: Metadata,
}

impl ReductionOutput {
    /// Whether the claim's instance side matches the source answer.
    /// `None` when the source answer was not computed.
    pub fn check(&self, oracle: &Oracle) -> Result<Option<bool>> {
        let Some(expected) = self.metadata.source_answer else { return Ok(None) };
        Ok(Some(self.claim.evaluate(&self.instance, oracle)? == expected))
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Calls `f` on every `k`-subset of `0..n` in colex order until it returns true.
fn any_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        if f(&c) {
            return true;
        }
        let mut j = 0;
        loop {
            if j == k {
                return false;
            }
            let limit = if j + 1 < k { c[j + 1] } else { n };
            if c[j] + 1 < limit {
                c[j] += 1;
                for (i, slot) in c.iter_mut().enumerate().take(j) {
                    *slot = i;
                }
                break;
            }
            j += 1;
        }
    }
}

fn has_clique(h: &Graph, k: usize) -> bool {
    any_subset(h.vertex_count(), k, |s| {
        s.iter().enumerate().all(|(i, &u)| s[i + 1..].iter().all(|&v| h.has_edge(u, v)))
    })
}

/// Host graph `H` on `n` vertices, a hub adjacent to all of `H`, and a clique
/// on `n²` vertices joined completely to `H`. `n² + k` agents of type 0, one of type 1.
pub fn from_clique(h: &Graph, clique_size: usize) -> Result<ReductionOutput> {
    let n = h.vertex_count();
    if clique_size == 0 || clique_size > n {
        return Err(Error::InvalidSource(format!("clique size {clique_size} not in 1..={n}")));
    }
    let sq = n * n;
    let hub = n;
    let pool: Vec<usize> = (n + 1..n + 1 + sq).collect();
    let mut edges: Vec<(usize, usize)> = h.edges().to_vec();
    for v in 0..n {
        edges.push((v, hub));
        edges.extend(pool.iter().map(|&w| (v, w)));
    }
    for (i, &u) in pool.iter().enumerate() {
        edges.extend(pool[i + 1..].iter().map(|&w| (u, w)));
    }
    let graph = Graph::new(n + 1 + sq, edges)?;
    let red = sq + clique_size;
    let instance = SchellingInstance::new(graph, vec![red, 1])?;
    let tail = Rational::new(red as i128 - 1, red as i128);
    let mut u_po = vec![Rational::one(); sq];
    u_po.extend(std::iter::repeat_n(tail, clique_size));
    let source_answer = (binomial(n, clique_size) <= SOURCE_SEARCH_LIMIT).then(|| has_clique(h, clique_size));
    Ok(ReductionOutput {
        instance,
        claim: Claim::PoRedVectorEquals { u_po },
        metadata: Metadata {
            reduction: "clique".into(),
            source: format!("graph on {n} vertices with {} edges, clique size {clique_size}", h.edge_count()),
            source_answer,
            hub: Some(hub),
            ..Metadata::default()
        },
    })
}

/// Complement of a bipartite graph whose left part is `0..left_size`;
/// `k` agents of each of two types.
pub fn from_biclique(h: &Graph, left_size: usize, k: usize) -> Result<ReductionOutput> {
    let n = h.vertex_count();
    if left_size > n {
        return Err(Error::InvalidSource(format!("left part {left_size} exceeds {n} vertices")));
    }
    if let Some(&(u, v)) = h.edges().iter().find(|&&(u, v)| (u < left_size) == (v < left_size)) {
        return Err(Error::InvalidSource(format!("edge {u}-{v} lies inside one side; graph is not bipartite")));
    }
    let right_size = n - left_size;
    if k < 2 {
        return Err(Error::InvalidSource("biclique size must be at least 2".into()));
    }
    if k > left_size.min(right_size) {
        return Err(Error::InvalidSource(format!("biclique size {k} exceeds a side")));
    }
    let instance = SchellingInstance::new(h.complement(), vec![k, k])?;
    let search = binomial(left_size, k).saturating_mul(binomial(right_size, k));
    let source_answer = (search <= SOURCE_SEARCH_LIMIT).then(|| {
        any_subset(left_size, k, |ls| {
            any_subset(right_size, k, |rs| ls.iter().all(|&l| rs.iter().all(|&r| h.has_edge(l, left_size + r))))
        })
    });
    Ok(ReductionOutput {
        instance,
        claim: Claim::PerfectExistsIffSource,
        metadata: Metadata {
            reduction: "biclique".into(),
            source: format!("bipartite graph {left_size}+{right_size} with {} edges, k = {k}", h.edge_count()),
            source_answer,
            ..Metadata::default()
        },
    })
}

/// Smallest number of edges crossing a balanced split, by brute force.
pub fn min_bisection(g: &Graph) -> Option<usize> {
    let n = g.vertex_count();
    if n % 2 == 1 || binomial(n, n / 2) > SOURCE_SEARCH_LIMIT {
        return None;
    }
    let mut best = usize::MAX;
    let mut side = vec![false; n];
    any_subset(n, n / 2, |s| {
        side.iter_mut().for_each(|x| *x = false);
        for &v in s {
            side[v] = true;
        }
        let cut = g.edges().iter().filter(|&&(u, v)| side[u] != side[v]).count();
        best = best.min(cut);
        false
    });
    Some(best)
}

/// A cubic graph with half the vertices of each type.
pub fn from_minbisection(g: &Graph, cut_bound: usize) -> Result<ReductionOutput> {
    let n = g.vertex_count();
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidSource(format!("need an even, nonzero vertex count, got {n}")));
    }
    if let Some(v) = (0..n).find(|&v| g.degree(v) != 3) {
        return Err(Error::InvalidSource(format!("graph is not cubic: vertex {v} has degree {}", g.degree(v))));
    }
    let instance = SchellingInstance::new(g.clone(), vec![n / 2, n / 2])?;
    let threshold = Rational::new(n as i128, 2) - Rational::new(cut_bound as i128, 3);
    Ok(ReductionOutput {
        instance,
        claim: Claim::GroupWelfareAtLeast { threshold },
        metadata: Metadata {
            reduction: "minbisection".into(),
            source: format!("cubic graph on {n} vertices, cut bound {cut_bound}"),
            source_answer: min_bisection(g).map(|best| best <= cut_bound),
            ..Metadata::default()
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Path,
    Clique,
}

/// Whether items fit into `bins` bins of capacity `capacity`.
fn packs(sizes: &[usize], bins: usize, capacity: usize) -> Option<bool> {
    let search = (bins as u128).checked_pow(sizes.len() as u32)?;
    if search > SOURCE_SEARCH_LIMIT {
        return None;
    }
    let mut order = sizes.to_vec();
    order.sort_unstable_by(|a, b| b.cmp(a));
    let mut load = vec![0; bins];
    fn place(items: &[usize], load: &mut [usize], capacity: usize) -> bool {
        let Some((&s, rest)) = items.split_first() else { return true };
        for i in 0..load.len() {
            if load[i] + s <= capacity {
                load[i] += s;
                let ok = place(rest, load, capacity);
                load[i] -= s;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    Some(place(&order, &mut load, capacity))
}

/// Even sizes summing to exactly `bins · capacity`: everything doubles when
/// any value is odd, then size-2 items pad the total.
pub fn normalize_packing(item_sizes: &[usize], bins: usize, capacity: usize) -> Result<(Vec<usize>, usize)> {
    if item_sizes.is_empty() || item_sizes.contains(&0) {
        return Err(Error::InvalidSource("item sizes must be positive and non-empty".into()));
    }
    if bins == 0 || capacity == 0 {
        return Err(Error::InvalidSource("bins and capacity must be positive".into()));
    }
    if let Some(s) = item_sizes.iter().find(|&&s| s > capacity) {
        return Err(Error::InvalidSource(format!("item {s} exceeds capacity {capacity}; no packing exists")));
    }
    let odd = capacity % 2 == 1 || item_sizes.iter().any(|s| s % 2 == 1);
    let factor = if odd { 2 } else { 1 };
    let mut sizes: Vec<usize> = item_sizes.iter().map(|s| s * factor).collect();
    let capacity = capacity * factor;
    let total: usize = sizes.iter().sum();
    let target = bins * capacity;
    if total > target {
        return Err(Error::InvalidSource(format!("items total {total} exceeds {bins} bins of size {capacity}")));
    }
    sizes.extend(std::iter::repeat_n(2, (target - total) / 2));
    Ok((sizes, capacity))
}

/// One component per normalized item (a path or clique on that many
/// vertices), `bins` types of `capacity` agents each. The tree variant adds
/// a hub joined to one end of every path.
pub fn from_binpacking(
    item_sizes: &[usize],
    bins: usize,
    capacity: usize,
    family: Family,
    tree_variant: bool,
) -> Result<ReductionOutput> {
    if tree_variant && family == Family::Clique {
        return Err(Error::InvalidSource("tree variant needs the path family".into()));
    }
    let (sizes, cap) = normalize_packing(item_sizes, bins, capacity)?;
    let mut graph = Graph::empty(0);
    let mut starts = Vec::with_capacity(sizes.len());
    for &s in &sizes {
        starts.push(graph.vertex_count());
        let part = match family {
            Family::Path => Graph::path(s),
            Family::Clique => Graph::complete(s),
        };
        graph = graph.disjoint_union(&part);
    }
    let mut hub = None;
    if tree_variant {
        let h = graph.vertex_count();
        let edges = graph.edges().iter().copied().chain(starts.iter().map(|&s| (s, h)));
        graph = Graph::new(h + 1, edges)?;
        hub = Some(h);
    }
    let instance = SchellingInstance::new(graph, vec![cap; bins])?;
    Ok(ReductionOutput {
        instance,
        claim: Claim::PerfectExistsIffSource,
        metadata: Metadata {
            reduction: "binpacking".into(),
            source: format!("items {item_sizes:?}, {bins} bins of size {capacity}"),
            source_answer: packs(item_sizes, bins, capacity),
            item_sizes: Some(sizes),
            capacity: Some(cap),
            hub,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeModel {
    /// Each pair independently.
    Probability(f64),
    /// Random pairs accepted while both endpoints stay within the bound.
    DegreeBound(usize),
}

pub fn random_graph(seed: u64, n: usize, model: EdgeModel) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    let edges: Vec<(usize, usize)> = match model {
        EdgeModel::Probability(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidSource(format!("edge probability {p} outside [0, 1]")));
            }
            pairs.filter(|_| rng.gen_bool(p)).collect()
        }
        EdgeModel::DegreeBound(d) => {
            let mut all: Vec<(usize, usize)> = pairs.collect();
            all.shuffle(&mut rng);
            let mut degree = vec![0; n];
            let mut kept = Vec::new();
            for (u, v) in all {
                if degree[u] < d && degree[v] < d {
                    degree[u] += 1;
                    degree[v] += 1;
                    kept.push((u, v));
                }
            }
            kept
        }
    };
    Graph::new(n, edges)
}

pub fn random_instance(seed: u64, n: usize, model: EdgeModel, type_counts: Vec<usize>) -> Result<SchellingInstance> {
    SchellingInstance::new(random_graph(seed, n, model)?, type_counts)
}

/// Random labelled tree: each vertex after the first attaches to an earlier one.
pub fn random_tree(seed: u64, n: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Graph::new(n, edges).expect("tree edges are valid")
}

/// Uniformly shuffled total assignment.
pub fn random_assignment(instance: &SchellingInstance, rng: &mut impl Rng) -> Assignment {
    let mut placement: Vec<Option<usize>> =
        instance.type_counts().iter().enumerate().flat_map(|(t, &a)| std::iter::repeat_n(Some(t), a)).collect();
    placement.resize(instance.vertex_count(), None);
    placement.shuffle(rng);
    Assignment::new(placement)
}
