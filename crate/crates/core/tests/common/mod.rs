//! Test-only helpers: an independent brute force over all placements and
//! proptest strategies for small instances.
#![allow(dead_code)]

use proptest::prelude::*;
use schelling_core::{Graph, Rational, SchellingInstance};

/// Every placement of exactly `type_counts` agents, by counting in base k+1.
pub fn all_placements(instance: &SchellingInstance) -> Vec<Vec<Option<usize>>> {
    let n = instance.vertex_count();
    let k = instance.num_types();
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let mut counts = vec![0; k];
        for &d in &digits {
            if d > 0 {
                counts[d - 1] += 1;
            }
        }
        if counts == instance.type_counts() {
            out.push(digits.iter().map(|&d| d.checked_sub(1)).collect());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            digits[i] += 1;
            if digits[i] <= k {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

pub fn utility(graph: &Graph, placement: &[Option<usize>], v: usize) -> Rational {
    let t = placement[v].expect("occupied");
    let occupied: Vec<usize> = graph.neighbors(v).iter().copied().filter(|&w| placement[w].is_some()).collect();
    if occupied.is_empty() {
        return Rational::zero();
    }
    let same = occupied.iter().filter(|&&w| placement[w] == Some(t)).count();
    Rational::new(same as i128, occupied.len() as i128)
}

pub fn welfare(graph: &Graph, placement: &[Option<usize>]) -> Rational {
    (0..placement.len()).filter(|&v| placement[v].is_some()).map(|v| utility(graph, placement, v)).sum()
}

pub fn brute_max_sw(instance: &SchellingInstance) -> Rational {
    all_placements(instance).iter().map(|p| welfare(instance.graph(), p)).max().unwrap()
}

pub fn brute_perfect(instance: &SchellingInstance) -> bool {
    let g = instance.graph();
    all_placements(instance).iter().any(|p| {
        (0..p.len()).filter(|&v| p[v].is_some()).all(|v| {
            let t = p[v];
            let occ: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| p[w].is_some()).collect();
            !occ.is_empty() && occ.iter().all(|&w| p[w] == t)
        })
    })
}

pub fn graph_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[i] {
                        edges.push((u, v));
                    }
                    i += 1;
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

/// Graphs on up to `max_n` vertices with up to `max_k` types.
pub fn instance_strategy(max_n: usize, max_k: usize) -> impl Strategy<Value = SchellingInstance> {
    graph_strategy(1, max_n).prop_flat_map(move |g| {
        let n = g.vertex_count();
        let k_max = max_k.min(n);
        (1..=k_max).prop_flat_map(move |k| {
            let g = g.clone();
            proptest::collection::vec(1..=(n / k).max(1), k)
                .prop_map(move |counts| SchellingInstance::new(g.clone(), counts).unwrap())
        })
    })
}

pub fn two_type_strategy(max_n: usize) -> impl Strategy<Value = SchellingInstance> {
    graph_strategy(2, max_n).prop_flat_map(|g| {
        let n = g.vertex_count();
        (1..n).prop_flat_map(move |r| {
            let g = g.clone();
            (1..=n - r).prop_map(move |b| SchellingInstance::two_types(g.clone(), r, b).unwrap())
        })
    })
}
