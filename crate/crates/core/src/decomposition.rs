//! Tree decompositions: elimination-order heuristics, exact width for small
//! graphs, conversion to nice form and validation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph accepted by [`Strategy::ExactSmall`].
pub const EXACT_MAX_VERTICES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    MinFill,
    MinDegree,
    ExactSmall,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::MinFill, Strategy::MinDegree, Strategy::ExactSmall];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::MinFill => "min_fill",
            Strategy::MinDegree => "min_degree",
            Strategy::ExactSmall => "exact_small",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "min_fill" => Ok(Strategy::MinFill),
            "min_degree" => Ok(Strategy::MinDegree),
            "exact_small" => Ok(Strategy::ExactSmall),
            other => Err(Error::Parse(format!("unknown decomposition strategy {other:?}"))),
        }
    }
}

/// A (not necessarily nice) tree decomposition with an undirected tree over
/// bag indices and a designated root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn new(mut bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>, root: usize) -> Self {
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        TreeDecomposition { bags, tree_edges, root }
    }

    /// Max bag size minus one; `-1` is reported as 0 for all-empty bags.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Checks the tree shape plus vertex coverage, edge coverage and
    /// connectivity of each vertex's bags.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidDecomposition(msg));
        let m = self.bags.len();
        if m == 0 {
            return fail("no bags".into());
        }
        if self.root >= m {
            return fail(format!("root {} out of range", self.root));
        }
        if let Some(&(a, b)) = self.tree_edges.iter().find(|&&(a, b)| a >= m || b >= m || a == b) {
            return fail(format!("bad tree edge ({a}, {b})"));
        }
        if self.tree_edges.len() != m - 1 {
            return fail(format!("{} tree edges for {m} bags; not a tree", self.tree_edges.len()));
        }
        let adj = self.adjacency();
        let mut seen = vec![false; m];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return fail("tree is disconnected".into());
        }
        let n = graph.vertex_count();
        if let Some(v) = self.bags.iter().flatten().find(|&&v| v >= n) {
            return fail(format!("bag holds unknown vertex {v}"));
        }
        if self.bags.iter().any(|b| b.windows(2).any(|w| w[0] >= w[1])) {
            return fail("bags must be sorted without repeats".into());
        }
        let (containing, parent) = (self.containing(n), self.parents());
        check_cover_and_connectivity(graph, &self.bags, &containing, &parent).map_err(Error::InvalidDecomposition)
    }

    fn containing(&self, n: usize) -> Vec<Vec<usize>> {
        let mut containing = vec![Vec::new(); n];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                containing[v].push(i);
            }
        }
        containing
    }

    fn parents(&self) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut parent = vec![None; self.bags.len()];
        let mut seen = vec![false; self.bags.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    stack.push(y);
                }
            }
        }
        parent
    }
}

/// Shared tail of both validators. `containing[v]` lists nodes whose bag holds `v`.
fn check_cover_and_connectivity(
    graph: &Graph,
    bags: &[Vec<usize>],
    containing: &[Vec<usize>],
    parent: &[Option<usize>],
) -> std::result::Result<(), String> {
    if let Some(v) = (0..graph.vertex_count()).find(|&v| containing[v].is_empty()) {
        return Err(format!("vertex uncovered: {v} appears in no bag"));
    }
    for &(u, v) in graph.edges() {
        if !containing[u].iter().any(|&i| bags[i].binary_search(&v).is_ok()) {
            return Err(format!("edge uncovered: ({u}, {v}) shares no bag"));
        }
    }
    for (v, nodes) in containing.iter().enumerate() {
        // Nodes holding v form a subtree iff exactly one of them has a parent outside the set.
        let tops = nodes.iter().filter(|&&i| parent[i].is_none_or(|p| bags[p].binary_search(&v).is_err())).count();
        if tops != 1 {
            return Err(format!("connectivity: bags holding vertex {v} form {tops} separate subtrees"));
        }
    }
    Ok(())
}

/// Greedy elimination order. `rank` breaks ties (lower first); pass `None`
/// for vertex-index order.
pub fn elimination_order(graph: &Graph, strategy: Strategy, rank: Option<&[usize]>) -> Result<Vec<usize>> {
    let n = graph.vertex_count();
    let identity: Vec<usize> = (0..n).collect();
    let rank = rank.unwrap_or(&identity);
    match strategy {
        Strategy::ExactSmall => exact_order(graph),
        Strategy::MinFill | Strategy::MinDegree => {
            let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| graph.neighbors(v).iter().copied().collect()).collect();
            let mut alive = vec![true; n];
            let mut order = Vec::with_capacity(n);
            for _ in 0..n {
                let v = (0..n)
                    .filter(|&v| alive[v])
                    .min_by_key(|&v| {
                        let primary = match strategy {
                            Strategy::MinFill => fill_in(&adj, v),
                            _ => adj[v].len(),
                        };
                        (primary, adj[v].len(), rank[v])
                    })
                    .expect("a live vertex remains");
                eliminate(&mut adj, v);
                alive[v] = false;
                order.push(v);
            }
            Ok(order)
        }
    }
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) {
    let nbrs: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
    for &a in &nbrs {
        adj[a].remove(&v);
        for &b in &nbrs {
            if a != b {
                adj[a].insert(b);
            }
        }
    }
}

/// Vertices outside `eliminated ∪ {v}` reachable from `v` through `eliminated`;
/// this is the neighborhood of `v` when eliminated right after that set.
fn reach_through(graph: &Graph, eliminated: u32, v: usize) -> u32 {
    let mut visited: u32 = 1 << v;
    let mut found: u32 = 0;
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for &w in graph.neighbors(x) {
            let bit = 1u32 << w;
            if visited & bit != 0 {
                continue;
            }
            visited |= bit;
            if eliminated & bit != 0 {
                stack.push(w);
            } else {
                found |= bit;
            }
        }
    }
    found
}

/// Optimal elimination order via the subset recurrence
/// `TW(S) = min_{v∈S} max(TW(S∖v), |Q(S∖v, v)|)`.
fn exact_order(graph: &Graph) -> Result<Vec<usize>> {
    let n = graph.vertex_count();
    if n > EXACT_MAX_VERTICES {
        return Err(Error::ExactTooLarge { max: EXACT_MAX_VERTICES, actual: n });
    }
    let full = (1usize << n) - 1;
    let mut best = vec![usize::MAX; full + 1];
    let mut choice = vec![0usize; full + 1];
    best[0] = 0;
    for s in 1..=full {
        for v in 0..n {
            if s & (1 << v) == 0 {
                continue;
            }
            let rest = s & !(1 << v);
            let q = reach_through(graph, rest as u32, v).count_ones() as usize;
            let cost = best[rest].max(q);
            if cost < best[s] {
                best[s] = cost;
                choice[s] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s];
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    Ok(order)
}

/// Width of the decomposition induced by eliminating vertices in `order`.
pub fn order_width(graph: &Graph, order: &[usize]) -> usize {
    from_elimination_order(graph, order).width()
}

/// Bag per vertex: the vertex plus its later neighbors in the filled graph.
/// Components hang under a shared empty root bag when the graph is disconnected.
pub fn from_elimination_order(graph: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = graph.vertex_count();
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], Vec::new(), 0);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| graph.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n + 1);
    let mut tree_edges = Vec::new();
    let mut roots = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag = later.clone();
        bag.push(v);
        bags.push(bag);
        match later.iter().min_by_key(|&&u| pos[u]) {
            Some(&u) => tree_edges.push((i, pos[u])),
            None => roots.push(i),
        }
        eliminate(&mut adj, v);
    }
    let root = if roots.len() == 1 {
        roots[0]
    } else {
        let hub = bags.len();
        bags.push(Vec::new());
        tree_edges.extend(roots.iter().map(|&r| (r, hub)));
        hub
    };
    TreeDecomposition::new(bags, tree_edges, root)
}

pub fn decompose(graph: &Graph, strategy: Strategy) -> Result<TreeDecomposition> {
    decompose_ranked(graph, strategy, None)
}

/// [`decompose`] with an explicit tie-break rank for the heuristics.
pub fn decompose_ranked(graph: &Graph, strategy: Strategy, rank: Option<&[usize]>) -> Result<TreeDecomposition> {
    let order = elimination_order(graph, strategy, rank)?;
    Ok(from_elimination_order(graph, &order))
}

/// Deterministic pseudo-random tie-break rank for [`decompose_ranked`].
pub fn seeded_rank(vertex_count: usize, seed: u64) -> Vec<usize> {
    let mut rank: Vec<usize> = (0..vertex_count).collect();
    rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    rank
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    /// Sorted ascending.
    pub bag: Vec<usize>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceTreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Children-before-parent order from the root. Assumes a valid tree.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((x, expanded)) = stack.pop() {
            if expanded {
                out.push(x);
            } else {
                stack.push((x, true));
                for &c in self.nodes[x].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, bag: Vec<usize>, kind: NodeKind, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { bag, kind, children });
        self.nodes.len() - 1
    }

    /// Forgets `from ∖ to` then introduces `to ∖ from`, both ascending.
    fn transition(&mut self, mut top: usize, to: &[usize]) -> usize {
        let from = self.nodes[top].bag.clone();
        let mut bag = from.clone();
        for &v in from.iter().filter(|v| to.binary_search(v).is_err()) {
            bag.retain(|&w| w != v);
            top = self.push(bag.clone(), NodeKind::Forget(v), vec![top]);
        }
        for &v in to.iter().filter(|v| from.binary_search(v).is_err()) {
            let at = bag.binary_search(&v).unwrap_err();
            bag.insert(at, v);
            top = self.push(bag.clone(), NodeKind::Introduce(v), vec![top]);
        }
        top
    }
}

/// Converts a valid decomposition to nice form with empty leaves and root.
/// Width is preserved.
pub fn make_nice(graph: &Graph, td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    td.validate(graph)?;
    let parent = td.parents();
    let mut children = vec![Vec::new(); td.bags.len()];
    let mut order = vec![td.root];
    let mut i = 0;
    let adj = td.adjacency();
    while i < order.len() {
        let x = order[i];
        for &y in &adj[x] {
            if parent[y] == Some(x) {
                children[x].push(y);
                order.push(y);
            }
        }
        i += 1;
    }
    let mut builder = NiceBuilder { nodes: Vec::new() };
    let mut top_of = vec![usize::MAX; td.bags.len()];
    for &x in order.iter().rev() {
        let bag = &td.bags[x];
        let mut tops: Vec<usize> = children[x].iter().map(|&c| builder.transition(top_of[c], bag)).collect();
        let top = if tops.is_empty() {
            let leaf = builder.push(Vec::new(), NodeKind::Leaf, Vec::new());
            builder.transition(leaf, bag)
        } else {
            let mut acc = tops.remove(0);
            for other in tops {
                acc = builder.push(bag.clone(), NodeKind::Join, vec![acc, other]);
            }
            acc
        };
        top_of[x] = top;
    }
    let root = builder.transition(top_of[td.root], &[]);
    Ok(NiceTreeDecomposition { nodes: builder.nodes, root })
}

/// Outcome of [`validate_nice`]; `diagnostics[0]` names the first violated rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceCheck {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

pub fn validate_nice(graph: &Graph, ntd: &NiceTreeDecomposition) -> NiceCheck {
    match check_nice(graph, ntd) {
        Ok(()) => NiceCheck { valid: true, diagnostics: Vec::new() },
        Err(msg) => NiceCheck { valid: false, diagnostics: vec![msg] },
    }
}

fn check_nice(graph: &Graph, ntd: &NiceTreeDecomposition) -> std::result::Result<(), String> {
    let m = ntd.nodes.len();
    if m == 0 || ntd.root >= m {
        return Err("tree structure: missing root".into());
    }
    let mut parent: Vec<Option<usize>> = vec![None; m];
    for (i, node) in ntd.nodes.iter().enumerate() {
        for &c in &node.children {
            if c >= m || c == ntd.root || parent[c].is_some() {
                return Err(format!("tree structure: node {c} has a bad or repeated parent"));
            }
            parent[c] = Some(i);
        }
    }
    // Reachability from the root rules out cycles given single parents.
    let mut seen = vec![false; m];
    let mut stack = vec![ntd.root];
    seen[ntd.root] = true;
    while let Some(x) = stack.pop() {
        for &c in &ntd.nodes[x].children {
            if seen[c] {
                return Err("tree structure: cycle".into());
            }
            seen[c] = true;
            stack.push(c);
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(format!("tree structure: node {x} unreachable from root"));
    }
    let n = graph.vertex_count();
    for (i, node) in ntd.nodes.iter().enumerate() {
        if node.bag.windows(2).any(|w| w[0] >= w[1]) || node.bag.iter().any(|&v| v >= n) {
            return Err(format!("bag of node {i} is not a sorted set of graph vertices"));
        }
    }
    if !ntd.nodes[ntd.root].bag.is_empty() {
        return Err("root bag not empty".into());
    }
    for (i, node) in ntd.nodes.iter().enumerate() {
        let child_bag = |j: usize| &ntd.nodes[node.children[j]].bag;
        match (node.kind, node.children.len()) {
            (NodeKind::Leaf, 0) => {
                if !node.bag.is_empty() {
                    return Err(format!("leaf not empty: node {i}"));
                }
            }
            (NodeKind::Introduce(v), 1) => {
                let c = child_bag(0);
                if c.binary_search(&v).is_ok() || !same_plus(&node.bag, c, v) {
                    return Err(format!("introduce rule: node {i} does not add {v} to its child's bag"));
                }
            }
            (NodeKind::Forget(v), 1) => {
                let c = child_bag(0);
                if node.bag.binary_search(&v).is_ok() || !same_plus(c, &node.bag, v) {
                    return Err(format!("forget rule: node {i} does not drop {v} from its child's bag"));
                }
            }
            (NodeKind::Join, 2) => {
                if child_bag(0) != &node.bag || child_bag(1) != &node.bag {
                    return Err(format!("join rule: children of node {i} have different bags"));
                }
            }
            (kind, count) => return Err(format!("node kind: {kind:?} at node {i} with {count} children")),
        }
    }
    let mut containing = vec![Vec::new(); n];
    for (i, node) in ntd.nodes.iter().enumerate() {
        for &v in &node.bag {
            containing[v].push(i);
        }
    }
    let bags: Vec<Vec<usize>> = ntd.nodes.iter().map(|x| x.bag.clone()).collect();
    check_cover_and_connectivity(graph, &bags, &containing, &parent)
}

/// `big == small ∪ {v}` for sorted sets.
fn same_plus(big: &[usize], small: &[usize], v: usize) -> bool {
    big.len() == small.len() + 1 && big.binary_search(&v).is_ok() && small.iter().all(|w| big.binary_search(w).is_ok())
}
