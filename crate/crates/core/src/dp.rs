//! Dynamic program over a nice tree decomposition.
//!
//! A class at node `t` records per-type agent counts inside `G_t`, the type
//! of every bag vertex and, per bag vertex, how many neighbors of each type
//! it has inside `G_t`. The stored value is the best welfare of agents on
//! `G_t` minus the bag. In perfect mode the neighbor counts shrink to a
//! single "has a same-type neighbor" flag.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use crate::decomposition::{validate_nice, NiceNode, NiceTreeDecomposition, NodeKind};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{profile, Assignment, SchellingInstance};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Welfare,
    Perfect,
}

/// Table key. `bag_types[j]` is 0 for an empty vertex, `i + 1` for type `i`.
/// `bag_neighbors` is flattened per bag vertex: `k` counts in welfare mode,
/// one 0/1 flag in perfect mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivalenceClass {
    pub sizes: Vec<u32>,
    pub bag_types: Vec<u32>,
    pub bag_neighbors: Vec<u32>,
}

impl EquivalenceClass {
    /// Neighbor counts (or the flag) of the bag vertex at position `pos`.
    pub fn neighbors_at(&self, pos: usize) -> &[u32] {
        let stride = self.bag_neighbors.len() / self.bag_types.len();
        &self.bag_neighbors[pos * stride..(pos + 1) * stride]
    }
}

/// Indices into the child tables, which are sorted by class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackPointer {
    Leaf,
    Child(usize),
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub partial_sw: Rational,
    pub back: BackPointer,
}

/// Reachable classes of one node, sorted by class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DpTable {
    entries: Vec<(EquivalenceClass, ClassRecord)>,
}

impl DpTable {
    pub fn entries(&self) -> &[(EquivalenceClass, ClassRecord)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, class: &EquivalenceClass) -> Option<usize> {
        self.entries.binary_search_by(|(c, _)| c.cmp(class)).ok()
    }

    pub fn get(&self, class: &EquivalenceClass) -> Option<&ClassRecord> {
        self.position(class).map(|i| &self.entries[i].1)
    }
}

/// Keeps the first record among equal maxima; callers feed candidates in
/// ascending child-key order so ties resolve to the smallest key.
#[derive(Default)]
struct TableBuilder {
    map: HashMap<EquivalenceClass, ClassRecord>,
}

impl TableBuilder {
    fn offer(&mut self, class: EquivalenceClass, partial_sw: Rational, back: BackPointer) {
        match self.map.entry(class) {
            Entry::Vacant(e) => {
                e.insert(ClassRecord { partial_sw, back });
            }
            Entry::Occupied(mut e) => {
                if partial_sw > e.get().partial_sw {
                    *e.get_mut() = ClassRecord { partial_sw, back };
                }
            }
        }
    }

    fn finish(self) -> DpTable {
        let mut entries: Vec<_> = self.map.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        DpTable { entries }
    }
}

struct Ctx<'a> {
    graph: &'a Graph,
    caps: Vec<u32>,
    k: usize,
    mode: Mode,
}

impl<'a> Ctx<'a> {
    fn new(instance: &'a SchellingInstance, mode: Mode) -> Self {
        Ctx {
            graph: instance.graph(),
            caps: instance.type_counts().iter().map(|&a| a as u32).collect(),
            k: instance.num_types(),
            mode,
        }
    }

    fn stride(&self) -> usize {
        match self.mode {
            Mode::Welfare => self.k,
            Mode::Perfect => 1,
        }
    }
}

fn wrong_kind(expected: &str, node: &NiceNode) -> Error {
    Error::InvalidDecomposition(format!("expected {expected} node, found {:?}", node.kind))
}

fn child_count(node: &NiceNode, expected: usize) -> Result<()> {
    if node.children.len() != expected {
        return Err(Error::InvalidDecomposition(format!(
            "{:?} node has {} children, expected {expected}",
            node.kind,
            node.children.len()
        )));
    }
    Ok(())
}

/// The single empty class with welfare 0.
pub fn process_leaf(instance: &SchellingInstance, node: &NiceNode) -> Result<DpTable> {
    if node.kind != NodeKind::Leaf {
        return Err(wrong_kind("leaf", node));
    }
    if !node.bag.is_empty() {
        return Err(Error::InvalidDecomposition("leaf not empty".into()));
    }
    let class =
        EquivalenceClass { sizes: vec![0; instance.num_types()], bag_types: Vec::new(), bag_neighbors: Vec::new() };
    let record = ClassRecord { partial_sw: Rational::zero(), back: BackPointer::Leaf };
    Ok(DpTable { entries: vec![(class, record)] })
}

pub fn process_introduce(
    instance: &SchellingInstance,
    mode: Mode,
    node: &NiceNode,
    child: &DpTable,
) -> Result<DpTable> {
    let NodeKind::Introduce(v) = node.kind else { return Err(wrong_kind("introduce", node)) };
    let ctx = Ctx::new(instance, mode);
    let p = node.bag.binary_search(&v).map_err(|_| Error::InvalidDecomposition("introduce rule".into()))?;
    let child_bag: Vec<usize> = node.bag.iter().copied().filter(|&w| w != v).collect();
    let adjacent: Vec<usize> = (0..child_bag.len()).filter(|&j| ctx.graph.has_edge(v, child_bag[j])).collect();
    let (k, stride) = (ctx.k, ctx.stride());
    let mut out = TableBuilder::default();
    for (ci, (c, rec)) in child.entries.iter().enumerate() {
        'choice: for tv in 0..=k as u32 {
            let mut sizes = c.sizes.clone();
            if tv > 0 {
                let i = tv as usize - 1;
                if sizes[i] >= ctx.caps[i] {
                    continue;
                }
                sizes[i] += 1;
            }
            let mut bag_types = c.bag_types.clone();
            bag_types.insert(p, tv);
            let mut nb = c.bag_neighbors.clone();
            let own: Vec<u32> = match mode {
                Mode::Welfare => {
                    let mut own = vec![0; k];
                    for &j in &adjacent {
                        let tw = c.bag_types[j];
                        if tw > 0 {
                            own[tw as usize - 1] += 1;
                        }
                        if tv > 0 {
                            nb[j * k + tv as usize - 1] += 1;
                        }
                    }
                    own
                }
                Mode::Perfect => {
                    let mut flag = 0;
                    if tv > 0 {
                        for &j in &adjacent {
                            match c.bag_types[j] {
                                0 => {}
                                tw if tw == tv => {
                                    flag = 1;
                                    nb[j] = 1;
                                }
                                _ => continue 'choice,
                            }
                        }
                    }
                    vec![flag]
                }
            };
            nb.splice(p * stride..p * stride, own);
            out.offer(EquivalenceClass { sizes, bag_types, bag_neighbors: nb }, rec.partial_sw, BackPointer::Child(ci));
        }
    }
    Ok(out.finish())
}

/// Utility of the forgotten vertex: 0 when empty or without occupied neighbors.
fn forgotten_utility(tv: u32, counts: &[u32]) -> Rational {
    if tv == 0 {
        return Rational::zero();
    }
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return Rational::zero();
    }
    Rational::new(counts[tv as usize - 1] as i128, total as i128)
}

pub fn process_forget(instance: &SchellingInstance, mode: Mode, node: &NiceNode, child: &DpTable) -> Result<DpTable> {
    let NodeKind::Forget(v) = node.kind else { return Err(wrong_kind("forget", node)) };
    let ctx = Ctx::new(instance, mode);
    let p = node.bag.binary_search(&v).err().ok_or_else(|| Error::InvalidDecomposition("forget rule".into()))?;
    let stride = ctx.stride();
    let mut out = TableBuilder::default();
    for (ci, (c, rec)) in child.entries.iter().enumerate() {
        let tv = c.bag_types[p];
        let own = &c.bag_neighbors[p * stride..(p + 1) * stride];
        let gain = match mode {
            Mode::Welfare => forgotten_utility(tv, own),
            Mode::Perfect => {
                if tv > 0 && own[0] == 0 {
                    continue;
                }
                Rational::zero()
            }
        };
        let mut bag_types = c.bag_types.clone();
        bag_types.remove(p);
        let mut nb = c.bag_neighbors.clone();
        nb.drain(p * stride..(p + 1) * stride);
        let class = EquivalenceClass { sizes: c.sizes.clone(), bag_types, bag_neighbors: nb };
        out.offer(class, rec.partial_sw + gain, BackPointer::Child(ci));
    }
    Ok(out.finish())
}

pub fn process_join(
    instance: &SchellingInstance,
    mode: Mode,
    node: &NiceNode,
    left: &DpTable,
    right: &DpTable,
) -> Result<DpTable> {
    if node.kind != NodeKind::Join {
        return Err(wrong_kind("join", node));
    }
    let ctx = Ctx::new(instance, mode);
    let (k, stride) = (ctx.k, ctx.stride());
    let bag = &node.bag;
    let adj: Vec<Vec<usize>> =
        (0..bag.len()).map(|j| (0..bag.len()).filter(|&l| ctx.graph.has_edge(bag[j], bag[l])).collect()).collect();
    let mut by_types: HashMap<&[u32], Vec<usize>> = HashMap::new();
    for (ri, (c, _)) in right.entries.iter().enumerate() {
        by_types.entry(c.bag_types.as_slice()).or_default().push(ri);
    }
    let mut out = TableBuilder::default();
    for (li, (c1, r1)) in left.entries.iter().enumerate() {
        let Some(partners) = by_types.get(c1.bag_types.as_slice()) else { continue };
        let types = &c1.bag_types;
        // Agents on the bag are counted on both sides.
        let mut shared = vec![0u32; k];
        for &t in types.iter().filter(|&&t| t > 0) {
            shared[t as usize - 1] += 1;
        }
        // Typed bag neighbors are counted on both sides as well.
        let mut shared_nb = vec![0u32; types.len() * k];
        for j in 0..types.len() {
            for &l in &adj[j] {
                if types[l] > 0 {
                    shared_nb[j * k + types[l] as usize - 1] += 1;
                }
            }
        }
        'pair: for &ri in partners {
            let (c2, r2) = &right.entries[ri];
            let mut sizes = Vec::with_capacity(k);
            for (i, &cap) in ctx.caps.iter().enumerate() {
                let s = c1.sizes[i] + c2.sizes[i] - shared[i];
                if s > cap {
                    continue 'pair;
                }
                sizes.push(s);
            }
            let nb: Vec<u32> = match mode {
                Mode::Welfare => (0..types.len() * stride)
                    .map(|x| c1.bag_neighbors[x] + c2.bag_neighbors[x] - shared_nb[x])
                    .collect(),
                Mode::Perfect => c1.bag_neighbors.iter().zip(&c2.bag_neighbors).map(|(a, b)| a | b).collect(),
            };
            let class = EquivalenceClass { sizes, bag_types: types.clone(), bag_neighbors: nb };
            out.offer(class, r1.partial_sw + r2.partial_sw, BackPointer::Pair(li, ri));
        }
    }
    Ok(out.finish())
}

/// `(|A|+1)^{k(1+|bag|)} · (k+1)^{|bag|}`, or `None` past `u128`.
pub fn table_size_bound(agents: usize, k: usize, bag: usize) -> Option<u128> {
    let base = (agents as u128 + 1).checked_pow(u32::try_from(k * (1 + bag)).ok()?)?;
    base.checked_mul((k as u128 + 1).checked_pow(u32::try_from(bag).ok()?)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpStats {
    /// Indexed by node.
    pub table_sizes: Vec<usize>,
    pub bag_sizes: Vec<usize>,
    pub peak_table: usize,
    pub width: usize,
}

impl DpStats {
    /// Nodes whose table exceeds the class-count bound.
    pub fn bound_violations(&self, agents: usize, k: usize) -> Vec<usize> {
        (0..self.table_sizes.len())
            .filter(|&t| match table_size_bound(agents, k, self.bag_sizes[t]) {
                Some(bound) => self.table_sizes[t] as u128 > bound,
                None => false,
            })
            .collect()
    }
}

/// All node tables of one run, kept for reconstruction.
#[derive(Debug, Clone)]
pub struct DpRun<'a> {
    instance: &'a SchellingInstance,
    ntd: &'a NiceTreeDecomposition,
    mode: Mode,
    tables: Vec<DpTable>,
}

impl<'a> DpRun<'a> {
    pub fn run(instance: &'a SchellingInstance, ntd: &'a NiceTreeDecomposition, mode: Mode) -> Result<Self> {
        let check = validate_nice(instance.graph(), ntd);
        if !check.valid {
            return Err(Error::InvalidDecomposition(check.diagnostics.join("; ")));
        }
        let mut tables = vec![DpTable::default(); ntd.len()];
        for t in ntd.post_order() {
            let node = &ntd.nodes[t];
            let table = match node.kind {
                NodeKind::Leaf => {
                    child_count(node, 0)?;
                    process_leaf(instance, node)?
                }
                NodeKind::Introduce(_) => {
                    child_count(node, 1)?;
                    process_introduce(instance, mode, node, &tables[node.children[0]])?
                }
                NodeKind::Forget(_) => {
                    child_count(node, 1)?;
                    process_forget(instance, mode, node, &tables[node.children[0]])?
                }
                NodeKind::Join => {
                    child_count(node, 2)?;
                    let (l, r) = (node.children[0], node.children[1]);
                    process_join(instance, mode, node, &tables[l], &tables[r])?
                }
            };
            tables[t] = table;
        }
        Ok(DpRun { instance, ntd, mode, tables })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn table(&self, node: usize) -> &DpTable {
        &self.tables[node]
    }

    pub fn stats(&self) -> DpStats {
        let table_sizes: Vec<usize> = self.tables.iter().map(DpTable::len).collect();
        DpStats {
            peak_table: table_sizes.iter().copied().max().unwrap_or(0),
            bag_sizes: self.ntd.nodes.iter().map(|n| n.bag.len()).collect(),
            width: self.ntd.width(),
            table_sizes,
        }
    }

    /// Root class index: every agent placed, empty bag.
    pub fn root_class(&self) -> Option<usize> {
        let class = EquivalenceClass {
            sizes: self.instance.type_counts().iter().map(|&a| a as u32).collect(),
            bag_types: Vec::new(),
            bag_neighbors: Vec::new(),
        };
        self.tables[self.ntd.root].position(&class)
    }

    /// Partial placement on `G_node` represented by class `index`; vertices
    /// outside the subtree stay `None`.
    pub fn representative(&self, node: usize, index: usize) -> Vec<Option<usize>> {
        let mut placement = vec![None; self.instance.vertex_count()];
        let mut stack = vec![(node, index)];
        while let Some((t, i)) = stack.pop() {
            let n = &self.ntd.nodes[t];
            let (class, record) = &self.tables[t].entries[i];
            for (&v, &tv) in n.bag.iter().zip(&class.bag_types) {
                if tv > 0 {
                    placement[v] = Some(tv as usize - 1);
                }
            }
            match record.back {
                BackPointer::Leaf => {}
                BackPointer::Child(c) => stack.push((n.children[0], c)),
                BackPointer::Pair(l, r) => {
                    stack.push((n.children[0], l));
                    stack.push((n.children[1], r));
                }
            }
        }
        placement
    }
}

#[derive(Debug, Clone)]
pub struct DpSolution {
    pub social_welfare: Rational,
    pub assignment: Assignment,
    pub stats: DpStats,
}

/// Maximum social welfare and a witness.
pub fn solve_wo(instance: &SchellingInstance, ntd: &NiceTreeDecomposition) -> Result<DpSolution> {
    let run = DpRun::run(instance, ntd, Mode::Welfare)?;
    let root = run.root_class().ok_or(Error::NoRootClass)?;
    let social_welfare = run.table(ntd.root).entries()[root].1.partial_sw;
    let assignment = Assignment::new(run.representative(ntd.root, root));
    debug_assert_eq!(profile(instance, &assignment).map(|p| p.sw_total), Ok(social_welfare));
    Ok(DpSolution { social_welfare, assignment, stats: run.stats() })
}

/// A perfect assignment if one exists.
pub fn solve_perfect(
    instance: &SchellingInstance,
    ntd: &NiceTreeDecomposition,
) -> Result<(Option<Assignment>, DpStats)> {
    let run = DpRun::run(instance, ntd, Mode::Perfect)?;
    let witness = run.root_class().map(|i| Assignment::new(run.representative(ntd.root, i)));
    Ok((witness, run.stats()))
}
