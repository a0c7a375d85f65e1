//! The feasibility closure `O_a` of a blue arc and the requirements on it.
//!
//! `O_a` is grown from the instance owning `a`. An edge-vertex in `O_a`
//! brings all four of its arcs; at a vertex above `v` the whole connector of
//! a touched arc joins; at a vertex below `v` a touched connector joins as a
//! whole as well, its blue arc pairing with its own white arc so that the
//! blue and white counts there stay equal. Nothing propagates through `v`.

use std::collections::BTreeSet;

use super::structure::{Circulation, CirculationIndex};
use crate::hypergraph::DirectedHypergraph;

/// The closure of one blue arc and what the requirements found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    /// Vertex the blue arc leaves.
    pub vertex: usize,
    /// Dense index of the instance owning the blue arc.
    pub start: usize,
    /// Instances whose edge-vertex lies in `O_a` (sorted).
    pub instances: Vec<usize>,
    /// Connectors holding at least one arc of `O_a` (sorted).
    pub connectors: Vec<usize>,
    /// Every vertex below `vertex` meets at most one blue arc of `O_a`.
    pub guard: bool,
    /// Blue arcs of `O_a` leaving `vertex`.
    pub blue_at_vertex: usize,
    /// Connectors at `vertex` holding a non-blue arc of `O_a`.
    pub entering: Vec<usize>,
    /// `O_a` has an arc of every non-blue color entering `vertex`.
    pub all_colors_return: bool,
}

impl Closure {
    /// The requirements hold, or the guard makes them vacuous.
    pub fn satisfied(&self) -> bool {
        !self.guard || (self.blue_at_vertex == 1 && self.entering.len() == 1 && self.all_colors_return)
    }
}

/// Computes `O_a` for the blue arc of instance `start`.
pub fn feasibility_closure(d: &DirectedHypergraph, c: &Circulation, idx: &CirculationIndex, start: usize) -> Closure {
    let r = c.arity();
    let verts = |hi: usize| &d.hyperedges()[idx.instances[hi].edge].verts;
    let v = verts(start)[r - 1];
    let mut inside = vec![false; idx.instances.len()];
    inside[start] = true;
    let mut stack = vec![start];
    while let Some(h) = stack.pop() {
        for role in 0..r {
            if verts(h)[role] == v {
                continue;
            }
            for &m in &c.connectors()[idx.holder[h][role]].members {
                let mi = c.index_of(m).unwrap();
                if !inside[mi] {
                    inside[mi] = true;
                    stack.push(mi);
                }
            }
        }
    }
    let instances: Vec<usize> = (0..inside.len()).filter(|&i| inside[i]).collect();
    let mut connectors = BTreeSet::new();
    let mut blue_below = std::collections::BTreeMap::new();
    let mut blue_at_vertex = 0;
    let mut entering = BTreeSet::new();
    let mut colors = vec![false; r - 1];
    for &h in &instances {
        for role in 0..r {
            let u = verts(h)[role];
            let ci = idx.holder[h][role];
            connectors.insert(ci);
            if role == r - 1 {
                if u == v {
                    blue_at_vertex += 1;
                } else if u < v {
                    *blue_below.entry(u).or_insert(0usize) += 1;
                }
            } else if u == v {
                entering.insert(ci);
                colors[role] = true;
            }
        }
    }
    Closure {
        vertex: v,
        start,
        instances,
        connectors: connectors.into_iter().collect(),
        guard: blue_below.values().all(|&k| k <= 1),
        blue_at_vertex,
        entering: entering.into_iter().collect(),
        all_colors_return: colors.iter().all(|&b| b),
    }
}

/// Checks the feasibility requirement for every blue arc; returns the first
/// failing closure.
pub fn check_feasibility(d: &DirectedHypergraph, c: &Circulation, idx: &CirculationIndex) -> Result<(), Box<Closure>> {
    for start in 0..idx.instances.len() {
        let cl = feasibility_closure(d, c, idx, start);
        if !cl.satisfied() {
            return Err(Box::new(cl));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulations::structure::{Connector, Instance};
    use crate::hypergraph::DirectedHypergraph;

    fn latin() -> DirectedHypergraph {
        let mut d = DirectedHypergraph::with_vertices(4, 4);
        for j in 0..4 {
            d = d.with(&[j, (j + 1) % 4, (j + 2) % 4, (j + 3) % 4]);
        }
        d
    }

    fn latin_circuit() -> Circulation {
        let h = |j: usize| Instance::new(j, 0);
        let conns = (0..4)
            .map(|v| Connector::new(v, (0..4).map(|i| h((v + 4 - i) % 4)).collect()))
            .collect();
        Circulation::new(4, (0..4).map(|e| (e, 1)), conns)
    }

    #[test]
    fn single_connector_circuit_is_feasible() {
        let d = latin();
        let c = latin_circuit();
        let idx = c.index().unwrap();
        for start in 0..4 {
            let cl = feasibility_closure(&d, &c, &idx, start);
            assert_eq!(cl.instances, vec![0, 1, 2, 3]);
            assert!(cl.all_colors_return);
            assert!(cl.guard);
            assert!(cl.satisfied());
        }
        assert!(check_feasibility(&d, &c, &idx).is_ok());
    }

    /// Two copies of the circuit glued at vertex 0 with the colors split
    /// between the copies: the closure from a blue arc at 0 stays inside its
    /// own copy, so the returning arcs sit in two different connectors.
    #[test]
    fn mixed_connector_at_lowest_vertex_fails() {
        let d = latin();
        let h = |j: usize, k: u32| Instance::new(j, k);
        let mut conns = Vec::new();
        for k in 0..2 {
            for v in 1..4 {
                conns.push(Connector::new(v, (0..4).map(|i| h((v + 4 - i) % 4, k)).collect()));
            }
        }
        // at 0: roles are h0, h3, h2, h1; swap only the white member
        conns.push(Connector::new(0, vec![h(0, 1), h(3, 0), h(2, 0), h(1, 0)]));
        conns.push(Connector::new(0, vec![h(0, 0), h(3, 1), h(2, 1), h(1, 1)]));
        let c = Circulation::new(4, (0..4).map(|e| (e, 2)), conns);
        let idx = c.index().unwrap();
        let err = check_feasibility(&d, &c, &idx).unwrap_err();
        assert_eq!(err.vertex, 0);
        assert!(err.guard);
        assert_eq!(err.entering.len(), 2);
        // from the blue arc at 2 the closure passes 0 and collects both
        // copies, so 0 sees two blue arcs and the requirements are vacuous
        let cl = feasibility_closure(&d, &c, &idx, c.index_of(Instance::new(3, 0)).unwrap());
        assert_eq!(cl.vertex, 2);
        assert_eq!(cl.instances.len(), 8);
        assert!(!cl.guard);
        assert!(cl.satisfied());
    }
}
