//! Exhaustive enumeration of aperiodic circulations up to a size bound, and
//! the truncated formal product built from them.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use super::feasibility::check_feasibility;
use super::structure::{check_structure, permutations, Circulation, Connector, Instance};
use crate::hypergraph::DirectedHypergraph;
use crate::poly::{product_trunc, Monomial, TruncatedPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("{count} hyperedge multisets exceed the limit {limit}")]
    TooManyMultisets { count: u64, limit: u64 },
    #[error("a multiset of size {size} admits {count} connector systems, above the limit {limit}")]
    TooManySystems { size: usize, count: u64, limit: u64 },
}

/// Ceilings for the enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_multisets: u64,
    pub max_systems: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_multisets: 5_000_000, max_systems: 2_000_000 }
    }
}

/// Multisets of hyperedges with `1..=max_size` elements in which every vertex
/// appears equally often in every position, with a connected support.
pub fn balanced_multisets(
    d: &DirectedHypergraph,
    max_size: usize,
    limits: EnumerationLimits,
) -> Result<Vec<Vec<(usize, u32)>>, EnumerationError> {
    let r = d.arity();
    let n = d.vertex_count();
    let mut out = Vec::new();
    let mut visited = 0u64;
    // counts[v][role]
    let mut counts = vec![vec![0i64; r]; n];
    let mut chosen: Vec<(usize, u32)> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        d: &DirectedHypergraph,
        next: usize,
        left: usize,
        counts: &mut Vec<Vec<i64>>,
        chosen: &mut Vec<(usize, u32)>,
        out: &mut Vec<Vec<(usize, u32)>>,
        visited: &mut u64,
        limits: EnumerationLimits,
    ) -> Result<(), EnumerationError> {
        *visited += 1;
        if *visited > limits.max_multisets {
            return Err(EnumerationError::TooManyMultisets { count: *visited, limit: limits.max_multisets });
        }
        if !chosen.is_empty() && counts.iter().all(|c| c.iter().all(|&x| x == c[0])) && support_connected(d, chosen) {
            out.push(chosen.clone());
        }
        if left == 0 {
            return Ok(());
        }
        // a vertex already unbalanced must be repaired by hyperedges >= next
        for (v, c) in counts.iter().enumerate() {
            let hi = *c.iter().max().unwrap();
            let deficit: i64 = c.iter().map(|&x| hi - x).sum();
            if deficit > left as i64 {
                return Ok(());
            }
            for (role, &x) in c.iter().enumerate() {
                if x < hi && !d.hyperedges()[next..].iter().any(|h| h.verts[role] == v) {
                    return Ok(());
                }
            }
        }
        for e in next..d.len() {
            let verts = d.hyperedges()[e].verts.clone();
            for k in 1..=left as u32 {
                for (role, &v) in verts.iter().enumerate() {
                    counts[v][role] += 1;
                }
                chosen.push((e, k));
                rec(d, e + 1, left - k as usize, counts, chosen, out, visited, limits)?;
                chosen.pop();
            }
            for (role, &v) in verts.iter().enumerate() {
                counts[v][role] -= left as i64;
            }
        }
        Ok(())
    }
    rec(d, 0, max_size, &mut counts, &mut chosen, &mut out, &mut visited, limits)?;
    Ok(out)
}

fn support_connected(d: &DirectedHypergraph, chosen: &[(usize, u32)]) -> bool {
    let sets: Vec<&Vec<usize>> = chosen.iter().map(|&(e, _)| &d.hyperedges()[e].verts).collect();
    let mut reached = vec![false; sets.len()];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..sets.len() {
            if !reached[j] && sets[j].iter().any(|v| sets[i].contains(v)) {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    reached.into_iter().all(|x| x)
}

/// Number of connector systems of a balanced multiset: at each vertex the
/// blue instances are held in a fixed order and each other role is permuted.
fn system_count(d: &DirectedHypergraph, mult: &[(usize, u32)]) -> u64 {
    let r = d.arity() as u32;
    let mut per_vertex: BTreeMap<usize, u64> = BTreeMap::new();
    for &(e, k) in mult {
        *per_vertex.entry(d.hyperedges()[e].verts[0]).or_insert(0) += k as u64;
    }
    per_vertex
        .values()
        .map(|&n| (1..=n).product::<u64>().saturating_pow(r - 1))
        .fold(1u64, |a, b| a.saturating_mul(b))
}

/// All aperiodic circulations on one multiset, canonical and sorted.
fn circulations_on(d: &DirectedHypergraph, mult: &[(usize, u32)]) -> Vec<Circulation> {
    let r = d.arity();
    let base = Circulation::new(r, mult.iter().copied(), Vec::new());
    let instances = base.instances();
    // holders[v][role] = instances with v in that position
    let mut holders: BTreeMap<usize, Vec<Vec<Instance>>> = BTreeMap::new();
    for &h in &instances {
        for (role, &v) in d.hyperedges()[h.edge].verts.iter().enumerate() {
            holders.entry(v).or_insert_with(|| vec![Vec::new(); r])[role].push(h);
        }
    }
    // every (vertex, non-blue role) slot ranges over permutations of its holders
    let slots: Vec<(usize, usize)> =
        holders.keys().flat_map(|&v| (0..r - 1).map(move |role| (v, role))).collect();
    let perms: Vec<Vec<Vec<u32>>> =
        slots.iter().map(|&(v, role)| permutations(holders[&v][role].len() as u32)).collect();
    let mut odometer = vec![0usize; slots.len()];
    let mut seen: BTreeSet<Circulation> = BTreeSet::new();
    let mut out = Vec::new();
    loop {
        let mut conns = Vec::new();
        for (&v, roles) in &holders {
            let blues = &roles[r - 1];
            for (j, &b) in blues.iter().enumerate() {
                let mut members = Vec::with_capacity(r);
                for role in 0..r - 1 {
                    let si = slots.binary_search(&(v, role)).unwrap();
                    members.push(roles[role][perms[si][odometer[si]][j] as usize]);
                }
                members.push(b);
                conns.push(Connector::new(v, members));
            }
        }
        let c = Circulation::new(r, mult.iter().copied(), conns);
        if let Ok(idx) = check_structure(d, &c) {
            let canon = c.canonical();
            if !seen.contains(&canon) {
                seen.insert(canon.clone());
                if check_feasibility(d, &c, &idx).is_ok() && !c.is_periodic() {
                    out.push(canon);
                }
            }
        }
        let mut j = 0;
        loop {
            if j == odometer.len() {
                return out;
            }
            odometer[j] += 1;
            if odometer[j] < perms[j].len() {
                break;
            }
            odometer[j] = 0;
            j += 1;
        }
    }
}

/// Every aperiodic circulation of `d` with `|S| <= max_size`, one per copy
/// relabeling class, sorted by (size, canonical form).
pub fn enumerate_circulations(
    d: &DirectedHypergraph,
    max_size: usize,
    limits: EnumerationLimits,
) -> Result<Vec<Circulation>, EnumerationError> {
    let multisets = balanced_multisets(d, max_size, limits)?;
    for m in &multisets {
        let count = system_count(d, m);
        if count > limits.max_systems {
            return Err(EnumerationError::TooManySystems {
                size: m.iter().map(|&(_, k)| k as usize).sum(),
                count,
                limit: limits.max_systems,
            });
        }
    }
    let mut out: Vec<Circulation> = multisets.par_iter().flat_map_iter(|m| circulations_on(d, m)).collect();
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// The factor `(1 + (-1)^m x^S)` of one circulation, with hyperedge signs
/// folded into the sign.
pub fn factor_of(d: &DirectedHypergraph, c: &Circulation) -> (i8, Monomial) {
    let mut minus = c.m() % 2 == 1;
    for &(e, k) in c.multiplicities() {
        if d.hyperedges()[e].sign.is_minus() && k % 2 == 1 {
            minus = !minus;
        }
    }
    (if minus { -1 } else { 1 }, c.monomial())
}

/// `prod (1 + (-1)^m x^S)` over aperiodic circulations, truncated at `cap`.
pub fn is4_truncated(d: &DirectedHypergraph, cap: u32, limits: EnumerationLimits) -> Result<TruncatedPolynomial, EnumerationError> {
    let circs = enumerate_circulations(d, cap as usize, limits)?;
    Ok(product_from(d, &circs, cap))
}

pub fn product_from(d: &DirectedHypergraph, circs: &[Circulation], cap: u32) -> TruncatedPolynomial {
    let factors: Vec<(i8, Monomial)> = circs.iter().map(|c| factor_of(d, c)).collect();
    product_trunc(&factors, cap).expect("circulations are nonempty")
}
