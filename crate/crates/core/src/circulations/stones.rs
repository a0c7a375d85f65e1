//! Splitting a circulation at a vertex `t` into stones, each with a single
//! connector at `t`, and gluing a circular order of stones back together.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::feasibility::feasibility_closure;
use super::structure::{check_structure, Circulation, Connector, Instance};
use crate::hypergraph::DirectedHypergraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoneError {
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("invariant: {0}")]
    Invariant(String),
}

/// A piece of a circulation, with the instance labels of the circulation it
/// was cut from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stone {
    pub instances: Vec<Instance>,
    pub connectors: Vec<Connector>,
}

impl Stone {
    /// The stone as a circulation of its own, copies renumbered from 0.
    pub fn circulation(&self, arity: usize) -> Circulation {
        densify(arity, &self.instances, &self.connectors)
    }

    /// Its connector at `t`.
    pub fn connector_at(&self, t: usize) -> Option<&Connector> {
        self.connectors.iter().find(|c| c.vertex == t)
    }
}

/// Renumbers the copies of each hyperedge to `0..k`, keeping their order.
fn densify(arity: usize, instances: &[Instance], connectors: &[Connector]) -> Circulation {
    let mut copies: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for h in instances {
        copies.entry(h.edge).or_default().push(h.copy);
    }
    for v in copies.values_mut() {
        v.sort_unstable();
    }
    let map = |h: Instance| Instance::new(h.edge, copies[&h.edge].binary_search(&h.copy).unwrap() as u32);
    let conns = connectors
        .iter()
        .map(|c| Connector::new(c.vertex, c.members.iter().map(|&h| map(h)).collect()))
        .collect();
    Circulation::new(arity, copies.iter().map(|(&e, v)| (e, v.len() as u32)), conns)
}

/// Runs the decomposition at `t`; stones come in their cyclic order,
/// starting from the first connector at `t`.
pub fn stones_decompose(d: &DirectedHypergraph, c: &Circulation, t: usize) -> Result<Vec<Stone>, StoneError> {
    let r = c.arity();
    let counts = c.connector_counts();
    if !counts.contains_key(&t) {
        return Err(StoneError::Precondition(format!("no connector at vertex {t}")));
    }
    if let Some((&v, _)) = counts.range(..t).find(|&(_, &k)| k > 1) {
        return Err(StoneError::Precondition(format!("vertex {v} below {t} has several connectors")));
    }
    let idx = check_structure(d, c).map_err(StoneError::Precondition)?;
    let first = c.connectors_at(t).next().unwrap().0;
    let mut chain = vec![first];
    let mut closures = Vec::new();
    loop {
        let cur = *chain.last().unwrap();
        let blue = c.index_of(c.connectors()[cur].blue()).unwrap();
        let cl = feasibility_closure(d, c, &idx, blue);
        if !(cl.guard && cl.satisfied()) {
            return Err(StoneError::Invariant(format!("closure of {} is not feasible", c.connectors()[cur])));
        }
        let next = cl.entering[0];
        closures.push(cl);
        if next == first {
            break;
        }
        if chain.contains(&next) {
            return Err(StoneError::Invariant("procedure revisits a connector".into()));
        }
        chain.push(next);
    }
    let k = chain.len();
    let mut covered = BTreeSet::new();
    for cl in &closures {
        for &h in &cl.instances {
            if !covered.insert(h) {
                return Err(StoneError::Invariant(format!("instance {} lies in two closures", idx.instances[h])));
            }
        }
    }
    if covered.len() != idx.instances.len() {
        return Err(StoneError::Invariant("closures do not cover S".into()));
    }
    let mut stones = Vec::with_capacity(k);
    for i in 0..k {
        let (ci, cn) = (chain[i], chain[(i + 1) % k]);
        let cl = &closures[i];
        let instances: Vec<Instance> = cl.instances.iter().map(|&h| idx.instances[h]).collect();
        let mut connectors: Vec<Connector> = cl
            .connectors
            .iter()
            .filter(|&&x| x != ci && x != cn)
            .map(|&x| c.connectors()[x].clone())
            .collect();
        let mut members = c.connectors()[cn].members[..r - 1].to_vec();
        members.push(c.connectors()[ci].blue());
        connectors.push(Connector::new(t, members));
        connectors.sort();
        for conn in &connectors {
            if let Some(h) = conn.members.iter().find(|h| !instances.contains(h)) {
                return Err(StoneError::Invariant(format!("connector {conn} reaches {h} outside its stone")));
            }
        }
        stones.push(Stone { instances, connectors });
    }
    Ok(stones)
}

/// Glues stones in the given circular order: the blue arc at `t` of each
/// stone moves to the connector of its predecessor.
pub fn recompose(arity: usize, stones: &[Stone], t: usize) -> Result<Circulation, StoneError> {
    let mut instances = Vec::new();
    let mut connectors = Vec::new();
    let m = stones.len();
    for (i, s) in stones.iter().enumerate() {
        let own = s.connector_at(t).ok_or_else(|| StoneError::Precondition(format!("stone {i} has no connector at {t}")))?;
        if s.connectors.iter().filter(|c| c.vertex == t).count() != 1 {
            return Err(StoneError::Precondition(format!("stone {i} has several connectors at {t}")));
        }
        let succ = stones[(i + 1) % m].connector_at(t).ok_or_else(|| StoneError::Precondition(format!("stone {} has no connector at {t}", (i + 1) % m)))?;
        let mut members = own.members[..arity - 1].to_vec();
        members.push(succ.blue());
        connectors.push(Connector::new(t, members));
        connectors.extend(s.connectors.iter().filter(|c| c.vertex != t).cloned());
        instances.extend(s.instances.iter().copied());
    }
    Ok(densify(arity, &instances, &connectors))
}

/// `m(c) = sum m(stones) - (r - 1)(k - 1)`.
pub fn m_formula_holds(c: &Circulation, stones: &[Stone]) -> bool {
    let r = c.arity();
    let sum: usize = stones.iter().map(|s| s.circulation(r).m()).sum();
    sum == c.m() + (r - 1) * (stones.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulations::enumerate::{enumerate_circulations, is4_truncated, EnumerationLimits};
    use crate::circulations::feasibility::check_feasibility;
    use crate::hyperalg::det_identity_minus;

    /// Two Latin blocks sharing vertex 0: `0,1,2,3` and `0,4,5,6`.
    fn bouquet() -> DirectedHypergraph {
        let mut d = DirectedHypergraph::with_vertices(4, 7);
        for block in [[0, 1, 2, 3], [0, 4, 5, 6]] {
            for j in 0..4 {
                d = d.with(&[block[j], block[(j + 1) % 4], block[(j + 2) % 4], block[(j + 3) % 4]]);
            }
        }
        d
    }

    #[test]
    fn bouquet_enumeration() {
        let d = bouquet();
        let circs = enumerate_circulations(&d, 8, EnumerationLimits::default()).unwrap();
        // each block alone, and the two glued at 0 with every color crossed
        assert_eq!(circs.len(), 3);
        assert_eq!(circs.iter().map(|c| c.m()).collect::<Vec<_>>(), vec![4, 4, 5]);
        assert_eq!(is4_truncated(&d, 8, EnumerationLimits::default()).unwrap(), det_identity_minus(&d, 8));
    }

    #[test]
    fn glued_bouquet_splits_into_blocks() {
        let d = bouquet();
        let circs = enumerate_circulations(&d, 8, EnumerationLimits::default()).unwrap();
        let glued = &circs[2];
        let stones = stones_decompose(&d, glued, 0).unwrap();
        assert_eq!(stones.len(), 2);
        for s in &stones {
            let sc = s.circulation(4);
            let idx = check_structure(&d, &sc).unwrap();
            assert!(check_feasibility(&d, &sc, &idx).is_ok());
            assert!(!sc.is_periodic());
            assert_eq!(sc.size(), 4);
        }
        assert_eq!(&recompose(4, &stones, 0).unwrap(), glued);
        assert!(m_formula_holds(glued, &stones));
        // a single stone recomposes to itself
        let alone = recompose(4, &stones[..1], 0).unwrap();
        assert_eq!(alone, stones[0].circulation(4));
    }

    #[test]
    fn single_connector_gives_one_stone() {
        let d = bouquet();
        let circs = enumerate_circulations(&d, 8, EnumerationLimits::default()).unwrap();
        let stones = stones_decompose(&d, &circs[0], 0).unwrap();
        assert_eq!(stones.len(), 1);
        assert_eq!(stones[0].circulation(4), circs[0]);
    }

    #[test]
    fn rejects_vertex_without_connector() {
        let d = bouquet();
        let circs = enumerate_circulations(&d, 4, EnumerationLimits::default()).unwrap();
        assert!(matches!(stones_decompose(&d, &circs[0], 6), Err(StoneError::Precondition(_))));
    }
}
