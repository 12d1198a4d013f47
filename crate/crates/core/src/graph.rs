use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Undirected simple graph on vertices `0..vertex_count`.
///
/// Edges are stored as sorted `(u, v)` pairs with `u < v`; adjacency lists
/// are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range endpoints.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) has an endpoint outside 0..{vertex_count}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge {:?}", w[0])));
        }
        Ok(Self::from_sorted_edges(vertex_count, normalized))
    }

    /// Like [`Graph::new`] but silently drops duplicate edges.
    pub fn new_dedup(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<_> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        list.sort_unstable();
        list.dedup();
        Self::new(vertex_count, list)
    }

    fn from_sorted_edges(vertex_count: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph { vertex_count, edges, adjacency }
    }

    pub fn empty(vertex_count: usize) -> Self {
        Self::from_sorted_edges(vertex_count, Vec::new())
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted_edges(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_sorted_edges(n, edges)
    }

    /// `K_{a,b}` with the left side `0..a` and the right side `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
        Self::from_sorted_edges(a + b, edges)
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_sorted_edges(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
    }

    /// Disjoint union, relabelling `other` after `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let offset = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
        Self::from_sorted_edges(self.vertex_count + other.vertex_count, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn complement(&self) -> Graph {
        let n = self.vertex_count;
        let edges =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !self.has_edge(u, v)).collect();
        Self::from_sorted_edges(n, edges)
    }

    /// Connected components, each sorted ascending, ordered by non-increasing
    /// size with ties broken by smallest minimum vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertex_count];
        let mut out = Vec::new();
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            let mut comp = self.bfs_from(start, |_| true, &mut seen);
            comp.sort_unstable();
            out.push(comp);
        }
        // Components were discovered in order of their minimum vertex.
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        out
    }

    /// Breadth-first order from `start` restricted to vertices accepted by
    /// `allowed`, visiting neighbors in ascending order. Marks visited vertices.
    pub fn bfs_from(&self, start: usize, allowed: impl Fn(usize) -> bool, seen: &mut [bool]) -> Vec<usize> {
        let mut order = Vec::new();
        if seen[start] || !allowed(start) {
            return order;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in &self.adjacency[u] {
                if !seen[w] && allowed(w) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Components of the subgraph induced by `vertices` (given as a membership mask).
    pub fn induced_components(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertex_count];
        let mut out = Vec::new();
        for v in 0..self.vertex_count {
            if mask[v] && !seen[v] {
                let mut comp = self.bfs_from(v, |w| mask[w], &mut seen);
                comp.sort_unstable();
                out.push(comp);
            }
        }
        out
    }

    /// Induced subgraph on `vertices` (kept in the given order). Returns the
    /// subgraph and the map from new index to original vertex.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.vertex_count];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u].min(index[v]), index[u].max(index[v])))
            .collect();
        edges.sort_unstable();
        (Self::from_sorted_edges(vertices.len(), edges), vertices.to_vec())
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count > 0 && self.edges.len() == self.vertex_count - 1 && self.components().len() == 1
    }
}
