//! Perfect-assignment decision for two types by guessing the blue positions.
//!
//! Blues must induce components of size at least 2. Reds then go into the
//! vertices at distance at least 2 from every blue, again in groups of at
//! least 2, which a greedy fill over the remaining components decides.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{Assignment, SchellingInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XpOutcome {
    pub witness: Option<Assignment>,
    /// Blue sets examined, at most `C(|V|, b)`.
    pub guesses: u64,
}

pub fn solve(instance: &SchellingInstance) -> Result<XpOutcome> {
    let [r, b] = *instance.type_counts() else {
        return Err(Error::Unsupported(format!("perfect search needs exactly 2 types, got {}", instance.num_types())));
    };
    let mut outcome = XpOutcome { witness: None, guesses: 0 };
    if r <= 1 || b <= 1 {
        return Ok(outcome);
    }
    let graph = instance.graph();
    let n = graph.vertex_count();
    let mut blues: Vec<usize> = (0..b).collect();
    loop {
        outcome.guesses += 1;
        if let Some(a) = try_guess(graph, &blues, r) {
            outcome.witness = Some(a);
            return Ok(outcome);
        }
        if !next_subset(&mut blues, n) {
            return Ok(outcome);
        }
    }
}

fn next_subset(c: &mut [usize], n: usize) -> bool {
    let m = c.len();
    for j in 0..m {
        let limit = if j + 1 < m { c[j + 1] } else { n };
        if c[j] + 1 < limit {
            c[j] += 1;
            for (i, slot) in c.iter_mut().enumerate().take(j) {
                *slot = i;
            }
            return true;
        }
    }
    false
}

fn try_guess(graph: &Graph, blues: &[usize], r: usize) -> Option<Assignment> {
    let n = graph.vertex_count();
    let mut is_blue = vec![false; n];
    for &v in blues {
        is_blue[v] = true;
    }
    if blues.iter().any(|&v| graph.neighbors(v).iter().all(|&w| !is_blue[w])) {
        return None;
    }
    let mut free = vec![true; n];
    for &v in blues {
        free[v] = false;
        for &w in graph.neighbors(v) {
            free[w] = false;
        }
    }
    let mut hosts: Vec<Vec<usize>> = graph.induced_components(&free).into_iter().filter(|c| c.len() >= 2).collect();
    hosts.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    if hosts.iter().map(Vec::len).sum::<usize>() < r {
        return None;
    }
    // Fill whole components in BFS order, largest first.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut left = r;
    for host in &hosts {
        if left == 0 {
            break;
        }
        let mut seen = vec![false; n];
        let order = graph.bfs_from(host[0], |w| free[w], &mut seen);
        let take = left.min(order.len());
        groups.push(order[..take].to_vec());
        left -= take;
    }
    let last = groups.len() - 1;
    if groups[last].len() == 1 {
        // A lone red: borrow one from an earlier component that keeps two.
        let donor = (0..last).find(|&i| groups[i].len() >= 3)?;
        groups[donor].pop();
        let host = &hosts[last];
        let mut seen = vec![false; n];
        let order = graph.bfs_from(host[0], |w| free[w], &mut seen);
        groups[last].push(order[1]);
    }
    let mut placement = vec![None; n];
    for &v in blues {
        placement[v] = Some(1);
    }
    for v in groups.into_iter().flatten() {
        placement[v] = Some(0);
    }
    Some(Assignment::new(placement))
}
