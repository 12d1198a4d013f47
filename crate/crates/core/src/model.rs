//! Instances, assignments, utilities and the domination relations behind
//! the optimality notions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{sort_desc, Rational};

/// A graph together with per-type agent counts `a_1..a_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchellingInstance {
    graph: Graph,
    type_counts: Vec<usize>,
}

impl SchellingInstance {
    pub fn new(graph: Graph, type_counts: Vec<usize>) -> Result<Self> {
        if type_counts.is_empty() {
            return Err(Error::InvalidInstance("at least one agent type is required".into()));
        }
        if let Some(i) = type_counts.iter().position(|&a| a == 0) {
            return Err(Error::InvalidInstance(format!("type {i} has no agents")));
        }
        let total: usize = type_counts.iter().sum();
        if total > graph.vertex_count() {
            return Err(Error::InvalidInstance(format!(
                "{total} agents do not fit on {} vertices",
                graph.vertex_count()
            )));
        }
        Ok(SchellingInstance { graph, type_counts })
    }

    /// Two-type convenience constructor: `red` agents of type 0, `blue` of type 1.
    pub fn two_types(graph: Graph, red: usize, blue: usize) -> Result<Self> {
        Self::new(graph, vec![red, blue])
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn type_counts(&self) -> &[usize] {
        &self.type_counts
    }

    pub fn num_types(&self) -> usize {
        self.type_counts.len()
    }

    pub fn agent_count(&self) -> usize {
        self.type_counts.iter().sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }
}

/// Vertex → type map. `None` marks an empty vertex; agents of one type are
/// interchangeable so no agent identities are kept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    placement: Vec<Option<usize>>,
}

impl Assignment {
    pub fn new(placement: Vec<Option<usize>>) -> Self {
        Assignment { placement }
    }

    pub fn empty(vertex_count: usize) -> Self {
        Assignment { placement: vec![None; vertex_count] }
    }

    pub fn placement(&self) -> &[Option<usize>] {
        &self.placement
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.placement[v]
    }

    pub fn set(&mut self, v: usize, t: Option<usize>) {
        self.placement[v] = t;
    }

    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.placement.iter().enumerate().filter_map(|(v, t)| t.map(|t| (v, t)))
    }

    /// Agents placed per type.
    pub fn counts(&self, num_types: usize) -> Vec<usize> {
        let mut counts = vec![0; num_types];
        for (_, t) in self.occupied() {
            if t < num_types {
                counts[t] += 1;
            }
        }
        counts
    }

    /// Checks shape and per-type counts. With `total`, every agent must be
    /// placed; otherwise counts may fall short.
    pub fn check(&self, instance: &SchellingInstance, total: bool) -> Result<()> {
        if self.placement.len() != instance.vertex_count() {
            return Err(Error::InvalidAssignment(format!(
                "placement covers {} vertices, graph has {}",
                self.placement.len(),
                instance.vertex_count()
            )));
        }
        let k = instance.num_types();
        if let Some((v, t)) = self.occupied().find(|&(_, t)| t >= k) {
            return Err(Error::InvalidAssignment(format!("vertex {v} holds unknown type {t}")));
        }
        let counts = self.counts(k);
        for (i, (&have, &want)) in counts.iter().zip(instance.type_counts()).enumerate() {
            if have > want {
                return Err(Error::InvalidAssignment(format!(
                    "type {i} placed {have} times, only {want} agents exist"
                )));
            }
        }
        let placed: usize = counts.iter().sum();
        if total && placed != instance.agent_count() {
            return Err(Error::PartialAssignment { placed, required: instance.agent_count() });
        }
        Ok(())
    }
}

/// Friend and occupied-neighbor counts `(f, f + e)` for the agent at `v`.
pub(crate) fn neighbor_counts(graph: &Graph, placement: &[Option<usize>], v: usize, t: usize) -> (usize, usize) {
    let mut friends = 0;
    let mut occupied = 0;
    for &w in graph.neighbors(v) {
        if let Some(tw) = placement[w] {
            occupied += 1;
            if tw == t {
                friends += 1;
            }
        }
    }
    (friends, occupied)
}

pub(crate) fn ratio_or_zero(friends: usize, occupied: usize) -> Rational {
    if occupied == 0 {
        Rational::zero()
    } else {
        Rational::new(friends as i128, occupied as i128)
    }
}

/// `f / (f + e)` for the agent on `vertex`, or 0 with no occupied neighbors.
pub fn utility(instance: &SchellingInstance, assignment: &Assignment, vertex: usize) -> Result<Rational> {
    let t = assignment.placement.get(vertex).copied().flatten().ok_or(Error::UnoccupiedVertex(vertex))?;
    let (f, n) = neighbor_counts(instance.graph(), &assignment.placement, vertex, t);
    Ok(ratio_or_zero(f, n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityProfile {
    /// Utility per vertex, `None` for empty vertices.
    pub per_vertex: Vec<Option<Rational>>,
    /// All utilities, non-increasing.
    pub sorted_vector: Vec<Rational>,
    /// One non-increasing vector per type.
    pub per_type_sorted: Vec<Vec<Rational>>,
    pub sw_total: Rational,
    pub sw_per_type: Vec<Rational>,
}

impl UtilityProfile {
    pub(crate) fn from_placement(graph: &Graph, placement: &[Option<usize>], num_types: usize) -> Self {
        let mut per_vertex = vec![None; placement.len()];
        let mut per_type_sorted = vec![Vec::new(); num_types];
        for (v, slot) in placement.iter().enumerate() {
            if let Some(t) = *slot {
                let (f, n) = neighbor_counts(graph, placement, v, t);
                let u = ratio_or_zero(f, n);
                per_vertex[v] = Some(u);
                per_type_sorted[t].push(u);
            }
        }
        let mut sw_per_type = Vec::with_capacity(num_types);
        let mut sorted_vector = Vec::with_capacity(placement.len());
        for values in &mut per_type_sorted {
            sort_desc(values);
            sw_per_type.push(values.iter().sum());
            sorted_vector.extend_from_slice(values);
        }
        sort_desc(&mut sorted_vector);
        let sw_total = sw_per_type.iter().sum();
        UtilityProfile { per_vertex, sorted_vector, per_type_sorted, sw_total, sw_per_type }
    }
}

pub fn profile(instance: &SchellingInstance, assignment: &Assignment) -> Result<UtilityProfile> {
    assignment.check(instance, true)?;
    Ok(UtilityProfile::from_placement(instance.graph(), &assignment.placement, instance.num_types()))
}

pub fn dominates_weak(x: &[Rational], y: &[Rational]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.iter().zip(y).all(|(a, b)| a >= b))
}

pub fn dominates_strict(x: &[Rational], y: &[Rational]) -> Result<bool> {
    Ok(dominates_weak(x, y)? && x.iter().zip(y).any(|(a, b)| a > b))
}

pub fn is_perfect(instance: &SchellingInstance, assignment: &Assignment) -> Result<bool> {
    assignment.check(instance, true)?;
    let graph = instance.graph();
    Ok(assignment.occupied().all(|(v, t)| {
        let (f, n) = neighbor_counts(graph, &assignment.placement, v, t);
        f > 0 && f == n
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Wo,
    Po,
    Gwo,
    Uvo,
    Perfect,
}

impl Notion {
    pub const ALL: [Notion; 5] = [Notion::Wo, Notion::Po, Notion::Gwo, Notion::Uvo, Notion::Perfect];
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::Wo => "WO",
            Notion::Po => "PO",
            Notion::Gwo => "GWO",
            Notion::Uvo => "UVO",
            Notion::Perfect => "Perfect",
        })
    }
}

impl FromStr for Notion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wo" => Ok(Notion::Wo),
            "po" => Ok(Notion::Po),
            "gwo" => Ok(Notion::Gwo),
            "uvo" => Ok(Notion::Uvo),
            "perfect" => Ok(Notion::Perfect),
            other => Err(Error::Parse(format!("unknown notion {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    ADominates,
    BDominates,
    Incomparable,
}

fn pareto_dominates(a: &UtilityProfile, b: &UtilityProfile) -> Result<bool> {
    if a.per_type_sorted.len() != b.per_type_sorted.len() {
        return Err(Error::LengthMismatch(a.per_type_sorted.len(), b.per_type_sorted.len()));
    }
    let mut strict = false;
    for (x, y) in a.per_type_sorted.iter().zip(&b.per_type_sorted) {
        if !dominates_weak(x, y)? {
            return Ok(false);
        }
        strict |= dominates_strict(x, y)?;
    }
    Ok(strict)
}

fn group_welfare_dominates(a: &UtilityProfile, b: &UtilityProfile) -> Result<bool> {
    dominates_strict(&a.sw_per_type, &b.sw_per_type)
}

/// Pairwise domination under PO, GWO or UVO.
pub fn compare_for_notion(notion: Notion, a: &UtilityProfile, b: &UtilityProfile) -> Result<Comparison> {
    let relation: fn(&UtilityProfile, &UtilityProfile) -> Result<bool> = match notion {
        Notion::Po => pareto_dominates,
        Notion::Gwo => group_welfare_dominates,
        Notion::Uvo => |a, b| dominates_strict(&a.sorted_vector, &b.sorted_vector),
        Notion::Wo | Notion::Perfect => return Err(Error::NotPairwise(notion)),
    };
    if relation(a, b)? {
        Ok(Comparison::ADominates)
    } else if relation(b, a)? {
        Ok(Comparison::BDominates)
    } else {
        Ok(Comparison::Incomparable)
    }
}
