//! Two-type solver parameterized by the agent counts and the maximum degree.
//!
//! A component with at least `(Δ+1)·r·(1+Δ·b)` vertices always fits a
//! connected red block and a connected blue block far apart, which is
//! optimal. Otherwise only the `r+b` largest components matter, and the
//! instance shrinks to them before exhaustive search.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{profile, Assignment, SchellingInstance};
use crate::oracle::Oracle;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelResult {
    /// Optimal assignment built directly on the largest component.
    Direct(Assignment),
    /// Reduced instance; `mapping[i]` is the original vertex of kernel vertex `i`.
    Kernel { instance: SchellingInstance, mapping: Vec<usize> },
}

/// `(Δ+1)·r·(1+Δ·b)`, saturating.
pub fn threshold(max_degree: usize, r: usize, b: usize) -> usize {
    max_degree.saturating_add(1).saturating_mul(r).saturating_mul(max_degree.saturating_mul(b).saturating_add(1))
}

/// Upper bound on kernel vertices: `(r+b)` components below the threshold.
pub fn kernel_size_bound(max_degree: usize, r: usize, b: usize) -> usize {
    r.saturating_add(b).saturating_mul(threshold(max_degree, r, b))
}

fn two_type_counts(instance: &SchellingInstance) -> Result<(usize, usize)> {
    match *instance.type_counts() {
        [r, b] => Ok((r, b)),
        _ => Err(Error::Unsupported(format!("kernel needs exactly 2 types, got {}", instance.num_types()))),
    }
}

/// Reds on the first `r` BFS vertices of `component`, blues on a BFS prefix
/// of a large enough component of what remains after removing `N[reds]`.
fn direct_assignment(graph: &Graph, component: &[usize], r: usize, b: usize) -> Option<Assignment> {
    let n = graph.vertex_count();
    let mut in_component = vec![false; n];
    for &v in component {
        in_component[v] = true;
    }
    let mut seen = vec![false; n];
    let order = graph.bfs_from(component[0], |w| in_component[w], &mut seen);
    let reds = &order[..r];
    let mut rest = in_component;
    for &v in reds {
        rest[v] = false;
        for &w in graph.neighbors(v) {
            rest[w] = false;
        }
    }
    let host = graph.induced_components(&rest).into_iter().find(|c| c.len() >= b)?;
    let mut seen = vec![false; n];
    let blue_order = graph.bfs_from(host[0], |w| rest[w], &mut seen);
    let mut placement = vec![None; n];
    for &v in reds {
        placement[v] = Some(0);
    }
    for &v in &blue_order[..b] {
        placement[v] = Some(1);
    }
    Some(Assignment::new(placement))
}

pub fn kernelize(instance: &SchellingInstance) -> Result<KernelResult> {
    let (r, b) = two_type_counts(instance)?;
    let graph = instance.graph();
    let components = graph.components();
    let delta = graph.max_degree();
    if components[0].len() >= threshold(delta, r, b) {
        if let Some(a) = direct_assignment(graph, &components[0], r, b) {
            return Ok(KernelResult::Direct(a));
        }
    }
    let mut kept: Vec<usize> = components.iter().take(r + b).flatten().copied().collect();
    kept.sort_unstable();
    let (sub, mapping) = graph.induced_subgraph(&kept);
    let instance = SchellingInstance::new(sub, vec![r, b])?;
    Ok(KernelResult::Kernel { instance, mapping })
}

/// Optimal welfare and a witness on the original instance.
pub fn solve_kernel(
    instance: &SchellingInstance,
    result: &KernelResult,
    oracle: &Oracle,
) -> Result<(Rational, Assignment)> {
    match result {
        KernelResult::Direct(a) => Ok((profile(instance, a)?.sw_total, a.clone())),
        KernelResult::Kernel { instance: kernel, mapping } => {
            let (sw, witness) = oracle.max_social_welfare(kernel)?;
            let mut placement = vec![None; instance.vertex_count()];
            for (i, &v) in mapping.iter().enumerate() {
                placement[v] = witness.get(i);
            }
            Ok((sw, Assignment::new(placement)))
        }
    }
}

pub fn solve(instance: &SchellingInstance, oracle: &Oracle) -> Result<(Rational, Assignment, KernelResult)> {
    let result = kernelize(instance)?;
    let (sw, a) = solve_kernel(instance, &result, oracle)?;
    Ok((sw, a, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangles(count: usize) -> Graph {
        (1..count).fold(Graph::complete(3), |g, _| g.disjoint_union(&Graph::complete(3)))
    }

    #[test]
    fn cycle_takes_direct_branch() {
        assert_eq!(threshold(2, 2, 2), 30);
        let inst = SchellingInstance::two_types(Graph::cycle(40), 2, 2).unwrap();
        let result = kernelize(&inst).unwrap();
        let KernelResult::Direct(a) = &result else { panic!("expected direct branch") };
        let p = profile(&inst, a).unwrap();
        assert_eq!(p.sw_total, Rational::from_integer(4));
        assert!(p.sorted_vector.iter().all(Rational::is_one));
    }

    #[test]
    fn triangles_are_pruned() {
        let inst = SchellingInstance::two_types(triangles(10), 2, 2).unwrap();
        let result = kernelize(&inst).unwrap();
        let KernelResult::Kernel { instance: kernel, mapping } = &result else { panic!("expected kernel") };
        assert_eq!(kernel.vertex_count(), 12);
        assert_eq!(mapping, &(0..12).collect::<Vec<_>>());
        let (sw, a) = solve_kernel(&inst, &result, &Oracle::default()).unwrap();
        assert_eq!(sw, Rational::from_integer(4));
        assert_eq!(profile(&inst, &a).unwrap().sw_total, sw);
    }

    #[test]
    fn small_instance_is_its_own_kernel() {
        let inst = SchellingInstance::two_types(Graph::path(4), 2, 2).unwrap();
        let result = kernelize(&inst).unwrap();
        let KernelResult::Kernel { instance: kernel, .. } = &result else { panic!("expected kernel") };
        assert_eq!(kernel, &inst);
        assert_eq!(solve(&inst, &Oracle::default()).unwrap().0, Rational::from_integer(3));
    }

    #[test]
    fn single_agent_types_still_optimal() {
        // Threshold 2·1·3 = 6 is met by a long path even with r = b = 1.
        let inst = SchellingInstance::two_types(Graph::path(30), 1, 1).unwrap();
        let result = kernelize(&inst).unwrap();
        assert!(matches!(result, KernelResult::Direct(_)));
        assert_eq!(solve(&inst, &Oracle::default()).unwrap().0, Rational::zero());
    }

    #[test]
    fn edgeless_graph_falls_back() {
        let inst = SchellingInstance::two_types(Graph::empty(6), 1, 1).unwrap();
        let result = kernelize(&inst).unwrap();
        let KernelResult::Kernel { instance: kernel, .. } = &result else { panic!("expected kernel") };
        assert_eq!(kernel.vertex_count(), 2);
    }

    #[test]
    fn rejects_other_type_counts() {
        let inst = SchellingInstance::new(Graph::path(4), vec![1, 1, 1]).unwrap();
        assert!(matches!(kernelize(&inst), Err(Error::Unsupported(_))));
    }
}
