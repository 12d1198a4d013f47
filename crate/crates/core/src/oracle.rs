//! Exhaustive ground truth over every distinct assignment.
//!
//! Deliberately unpruned: the oracle checks the other solvers, so it only
//! enumerates and compares.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{
    compare_for_notion, neighbor_counts, Assignment, Comparison, Notion, SchellingInstance, UtilityProfile,
};
use crate::rational::Rational;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Number of distinct vertex→type maps: `|V|! / (a_1! ⋯ a_k! (|V| − Σa)!)`,
/// saturating at `u128::MAX`.
pub fn assignment_count(instance: &SchellingInstance) -> u128 {
    let mut remaining = instance.vertex_count() as u128;
    let mut total: u128 = 1;
    for &a in instance.type_counts() {
        total = total.saturating_mul(binomial(remaining, a as u128));
        remaining -= a as u128;
    }
    total
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        match acc.checked_mul(n - i) {
            Some(v) => acc = v / (i + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Walks all distinct total assignments: occupied vertex sets in colex
/// order, then type patterns on each set in lexicographic order.
#[derive(Debug, Clone)]
pub struct EnumerationCursor {
    vertex_count: usize,
    occupied: Vec<usize>,
    pattern: Vec<usize>,
    placement: Vec<Option<usize>>,
    started: bool,
    done: bool,
}

impl EnumerationCursor {
    fn new(instance: &SchellingInstance) -> Self {
        let m = instance.agent_count();
        let pattern: Vec<usize> =
            instance.type_counts().iter().enumerate().flat_map(|(t, &a)| std::iter::repeat_n(t, a)).collect();
        EnumerationCursor {
            vertex_count: instance.vertex_count(),
            occupied: (0..m).collect(),
            pattern,
            placement: vec![None; instance.vertex_count()],
            started: false,
            done: false,
        }
    }

    /// Advances and returns the next placement, borrowing the cursor's buffer.
    pub fn advance(&mut self) -> Option<&[Option<usize>]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !next_permutation(&mut self.pattern) {
            // Pattern wrapped back to sorted order; move to the next vertex set.
            if !next_colex(&mut self.occupied, self.vertex_count) {
                self.done = true;
                return None;
            }
        }
        self.placement.iter_mut().for_each(|s| *s = None);
        for (&v, &t) in self.occupied.iter().zip(&self.pattern) {
            self.placement[v] = Some(t);
        }
        Some(&self.placement)
    }
}

impl Iterator for EnumerationCursor {
    type Item = Assignment;
    fn next(&mut self) -> Option<Assignment> {
        self.advance().map(|p| Assignment::new(p.to_vec()))
    }
}

/// Lexicographic next permutation of a multiset; on the last permutation
/// resets to sorted order and returns false.
fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

fn next_colex(c: &mut [usize], n: usize) -> bool {
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

/// Utility as a reduced small fraction; cheaper than [`Rational`] in the inner loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Frac {
    num: u32,
    den: u32,
}

impl Frac {
    fn new(f: usize, n: usize) -> Self {
        if f == 0 || n == 0 {
            return Frac { num: 0, den: 1 };
        }
        let g = num_integer::gcd(f, n);
        Frac { num: (f / g) as u32, den: (n / g) as u32 }
    }

    fn cmp_value(&self, other: &Frac) -> std::cmp::Ordering {
        (self.num as u64 * other.den as u64).cmp(&(other.num as u64 * self.den as u64))
    }

    fn to_rational(self) -> Rational {
        Rational::new(self.num as i128, self.den as i128)
    }
}

/// Per-type sorted utility vectors; determines every welfare quantity.
type ProfileKey = Vec<Vec<Frac>>;

fn profile_key(instance: &SchellingInstance, placement: &[Option<usize>]) -> ProfileKey {
    let graph = instance.graph();
    let mut key: ProfileKey = instance.type_counts().iter().map(|&a| Vec::with_capacity(a)).collect();
    for (v, slot) in placement.iter().enumerate() {
        if let Some(t) = *slot {
            let (f, n) = neighbor_counts(graph, placement, v, t);
            key[t].push(Frac::new(f, n));
        }
    }
    for values in &mut key {
        values.sort_by(|a, b| b.cmp_value(a));
    }
    key
}

fn key_to_profile(key: &ProfileKey) -> UtilityProfile {
    let per_type_sorted: Vec<Vec<Rational>> =
        key.iter().map(|vs| vs.iter().map(|f| f.to_rational()).collect()).collect();
    let sw_per_type: Vec<Rational> = per_type_sorted.iter().map(|vs| vs.iter().sum()).collect();
    let mut sorted_vector: Vec<Rational> = per_type_sorted.iter().flatten().copied().collect();
    crate::rational::sort_desc(&mut sorted_vector);
    UtilityProfile {
        per_vertex: Vec::new(),
        sw_total: sw_per_type.iter().sum(),
        sorted_vector,
        per_type_sorted,
        sw_per_type,
    }
}

/// One distinct utility profile and the lexicographically smallest
/// assignment realizing it.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    /// `per_vertex` is left empty; profile the witness for per-vertex values.
    pub profile: UtilityProfile,
    pub witness: Assignment,
    pub multiplicity: u64,
}

/// All distinct utility profiles of an instance.
///
/// PO, GWO and UVO depend only on the profile, so domination checks run over
/// distinct profiles instead of all assignment pairs.
#[derive(Debug, Clone)]
pub struct ProfileCatalog {
    entries: Vec<CatalogEntry>,
    total: u64,
}

impl ProfileCatalog {
    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn assignment_total(&self) -> u64 {
        self.total
    }

    pub fn max_social_welfare(&self) -> Rational {
        self.entries.iter().map(|e| e.profile.sw_total).max().unwrap_or_else(Rational::zero)
    }

    /// Some entry dominating `profile` under `notion`, if any.
    pub fn dominator_of(&self, profile: &UtilityProfile, notion: Notion) -> Result<Option<&CatalogEntry>> {
        match notion {
            Notion::Wo => {
                let best = self.entries.iter().max_by(|a, b| a.profile.sw_total.cmp(&b.profile.sw_total));
                Ok(best.filter(|e| e.profile.sw_total > profile.sw_total))
            }
            Notion::Perfect => Err(Error::NotPairwise(notion)),
            _ => {
                for e in &self.entries {
                    if compare_for_notion(notion, &e.profile, profile)? == Comparison::ADominates {
                        return Ok(Some(e));
                    }
                }
                Ok(None)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    budget: u128,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { budget: DEFAULT_BUDGET }
    }
}

impl Oracle {
    pub fn with_budget(budget: u128) -> Self {
        Oracle { budget }
    }

    pub fn budget(&self) -> u128 {
        self.budget
    }

    fn guard(&self, instance: &SchellingInstance) -> Result<()> {
        let count = assignment_count(instance);
        if count > self.budget {
            return Err(Error::BudgetExceeded { count, budget: self.budget });
        }
        Ok(())
    }

    pub fn enumerate(&self, instance: &SchellingInstance) -> Result<EnumerationCursor> {
        self.guard(instance)?;
        Ok(EnumerationCursor::new(instance))
    }

    /// Maximum social welfare with the lexicographically smallest witness.
    pub fn max_social_welfare(&self, instance: &SchellingInstance) -> Result<(Rational, Assignment)> {
        let mut cursor = self.enumerate(instance)?;
        let graph = instance.graph();
        let mut best: Option<(Rational, Vec<Option<usize>>)> = None;
        while let Some(p) = cursor.advance() {
            let sw: Rational = p
                .iter()
                .enumerate()
                .filter_map(|(v, t)| t.map(|t| neighbor_counts(graph, p, v, t)))
                .map(|(f, n)| Frac::new(f, n).to_rational())
                .sum();
            let better = match &best {
                None => true,
                Some((b, w)) => sw > *b || (sw == *b && p < w.as_slice()),
            };
            if better {
                best = Some((sw, p.to_vec()));
            }
        }
        let (sw, w) = best.expect("at least one assignment exists");
        Ok((sw, Assignment::new(w)))
    }

    /// A perfect assignment if one exists (the first in enumeration order).
    pub fn perfect_exists(&self, instance: &SchellingInstance) -> Result<Option<Assignment>> {
        let mut cursor = self.enumerate(instance)?;
        let graph = instance.graph();
        while let Some(p) = cursor.advance() {
            let perfect = p.iter().enumerate().all(|(v, t)| match t {
                None => true,
                Some(t) => {
                    let (f, n) = neighbor_counts(graph, p, v, *t);
                    f > 0 && f == n
                }
            });
            if perfect {
                return Ok(Some(Assignment::new(p.to_vec())));
            }
        }
        Ok(None)
    }

    pub fn catalog(&self, instance: &SchellingInstance) -> Result<ProfileCatalog> {
        let mut cursor = self.enumerate(instance)?;
        let mut index: HashMap<ProfileKey, usize> = HashMap::new();
        let mut keys: Vec<ProfileKey> = Vec::new();
        let mut witnesses: Vec<(Vec<Option<usize>>, u64)> = Vec::new();
        let mut total = 0u64;
        while let Some(p) = cursor.advance() {
            total += 1;
            let key = profile_key(instance, p);
            match index.get(&key) {
                Some(&i) => {
                    let (w, m) = &mut witnesses[i];
                    *m += 1;
                    if p < w.as_slice() {
                        *w = p.to_vec();
                    }
                }
                None => {
                    index.insert(key.clone(), keys.len());
                    keys.push(key);
                    witnesses.push((p.to_vec(), 1));
                }
            }
        }
        let entries = keys
            .iter()
            .zip(witnesses)
            .map(|(k, (w, m))| CatalogEntry {
                profile: key_to_profile(k),
                witness: Assignment::new(w),
                multiplicity: m,
            })
            .collect();
        Ok(ProfileCatalog { entries, total })
    }

    /// Exhaustive notion check for a total assignment.
    pub fn check_notion(&self, instance: &SchellingInstance, assignment: &Assignment, notion: Notion) -> Result<bool> {
        Ok(self.counterexample(instance, assignment, notion)?.is_none())
    }

    /// An assignment witnessing that `assignment` fails `notion`: a dominating
    /// assignment for PO/GWO/UVO, a higher-welfare one for WO. For Perfect the
    /// check is local and the failing assignment itself is returned.
    pub fn counterexample(
        &self,
        instance: &SchellingInstance,
        assignment: &Assignment,
        notion: Notion,
    ) -> Result<Option<Assignment>> {
        let profile = crate::model::profile(instance, assignment)?;
        if notion == Notion::Perfect {
            let perfect = profile.sorted_vector.iter().all(Rational::is_one) && instance.agent_count() > 0;
            return Ok((!perfect).then(|| assignment.clone()));
        }
        if notion == Notion::Wo {
            let (best, witness) = self.max_social_welfare(instance)?;
            return Ok((best > profile.sw_total).then_some(witness));
        }
        let catalog = self.catalog(instance)?;
        Ok(catalog.dominator_of(&profile, notion)?.map(|e| e.witness.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use std::collections::HashSet;

    fn inst(g: Graph, counts: Vec<usize>) -> SchellingInstance {
        SchellingInstance::new(g, counts).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let oracle = Oracle::default();
        let cases = [
            (inst(Graph::path(2), vec![1, 1]), 2),
            (inst(Graph::path(4), vec![2, 2]), 6),
            (inst(Graph::path(3), vec![1, 1]), 6),
            (inst(Graph::path(6), vec![2, 1, 1]), 180),
        ];
        for (instance, expected) in cases {
            let all: Vec<Assignment> = oracle.enumerate(&instance).unwrap().collect();
            assert_eq!(all.len(), expected);
            assert_eq!(assignment_count(&instance), expected as u128);
            let distinct: HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), expected);
            for a in &all {
                a.check(&instance, true).unwrap();
            }
        }
    }

    #[test]
    fn budget_guard() {
        let instance = inst(Graph::path(20), vec![5, 5]);
        let err = Oracle::with_budget(1000).enumerate(&instance).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(err.to_string().contains("instance too large for oracle"));
    }

    #[test]
    fn max_sw_examples() {
        let oracle = Oracle::default();
        let (sw, w) = oracle.max_social_welfare(&inst(Graph::path(4), vec![2, 2])).unwrap();
        assert_eq!(sw, Rational::from_integer(3));
        // Lexicographically smallest optimum puts type 0 on the first two vertices.
        assert_eq!(w.placement(), &[Some(0), Some(0), Some(1), Some(1)]);
        let two_edges = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(oracle.max_social_welfare(&inst(two_edges, vec![2, 2])).unwrap().0, Rational::from_integer(4));
        assert_eq!(oracle.max_social_welfare(&inst(Graph::complete(4), vec![2, 2])).unwrap().0, Rational::new(4, 3));
    }

    #[test]
    fn notion_checks() {
        let oracle = Oracle::default();
        let p4 = inst(Graph::path(4), vec![2, 2]);
        let (_, w) = oracle.max_social_welfare(&p4).unwrap();
        for notion in [Notion::Wo, Notion::Uvo, Notion::Gwo, Notion::Po] {
            assert!(oracle.check_notion(&p4, &w, notion).unwrap(), "{notion}");
        }
        let alternating = Assignment::new(vec![Some(0), Some(1), Some(0), Some(1)]);
        assert!(!oracle.check_notion(&p4, &alternating, Notion::Wo).unwrap());
        assert_eq!(crate::model::profile(&p4, &alternating).unwrap().sw_total, Rational::zero());

        let two_edges = inst(Graph::new(4, [(0, 1), (2, 3)]).unwrap(), vec![2, 2]);
        let split = Assignment::new(vec![Some(0), Some(0), Some(1), Some(1)]);
        for notion in Notion::ALL {
            assert!(oracle.check_notion(&two_edges, &split, notion).unwrap(), "{notion}");
        }
    }

    #[test]
    fn perfect_examples() {
        let oracle = Oracle::default();
        let two_edges = inst(Graph::new(4, [(0, 1), (2, 3)]).unwrap(), vec![2, 2]);
        assert!(oracle.perfect_exists(&two_edges).unwrap().is_some());
        assert!(oracle.perfect_exists(&inst(Graph::path(3), vec![2, 1])).unwrap().is_none());
        assert!(oracle.perfect_exists(&inst(Graph::complete(5), vec![3, 1])).unwrap().is_none());
    }

    #[test]
    fn permutation_helpers() {
        let mut xs = vec![0, 0, 1];
        let mut seen = vec![xs.clone()];
        while next_permutation(&mut xs) {
            seen.push(xs.clone());
        }
        assert_eq!(seen, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(xs, vec![0, 0, 1]);

        let mut c = vec![0, 1];
        let mut sets = vec![c.clone()];
        while next_colex(&mut c, 4) {
            sets.push(c.clone());
        }
        assert_eq!(sets, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
    }
}
