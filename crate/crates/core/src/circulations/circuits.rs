//! Circuits: circulations that use each hyperedge at most once and have a
//! single connector at every vertex they touch. Sums over vertex-disjoint
//! families of circuits expand `det(I - A)` and `det(A)`.

use num_bigint::BigInt;
use thiserror::Error;

use super::structure::{Circulation, Connector, Instance};
use crate::hypergraph::DirectedHypergraph;
use crate::poly::{Monomial, TruncatedPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("circuit search visited more than {limit} states")]
    TooManyStates { limit: u64 },
}

pub const DEFAULT_CIRCUIT_LIMIT: u64 = 20_000_000;

/// A circuit together with the vertices it covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    pub circulation: Circulation,
}

impl Circuit {
    fn build(d: &DirectedHypergraph, mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        let r = d.arity();
        let mut at: std::collections::BTreeMap<usize, Vec<Option<Instance>>> = Default::default();
        for &e in &edges {
            for (role, &v) in d.hyperedges()[e].verts.iter().enumerate() {
                at.entry(v).or_insert_with(|| vec![None; r])[role] = Some(Instance::new(e, 0));
            }
        }
        let vertices: Vec<usize> = at.keys().copied().collect();
        let conns = at
            .into_iter()
            .map(|(v, m)| Connector::new(v, m.into_iter().map(|x| x.expect("complete vertex")).collect()))
            .collect();
        let circulation = Circulation::new(r, edges.iter().map(|&e| (e, 1)), conns);
        Circuit { edges, vertices, circulation }
    }

    /// Sign of the circuit's term in `det(I - A)`: `(-1)^m` times the
    /// hyperedge signs.
    pub fn sign_identity_minus(&self, d: &DirectedHypergraph) -> bool {
        (self.circulation.m() % 2 == 1) ^ self.edge_sign(d)
    }

    /// Sign of the circuit's term in `det(A)`: one `(-1)^{p-1}` per connector
    /// cycle through `p` connectors, times the hyperedge signs.
    pub fn sign_det(&self, d: &DirectedHypergraph) -> bool {
        let idx = self.circulation.index().expect("circuit");
        let cycles = (0..d.arity() - 1).flat_map(|color| idx.connector_cycles(&self.circulation, color));
        (cycles.filter(|z| z.sign_is_minus()).count() % 2 == 1) ^ self.edge_sign(d)
    }

    fn edge_sign(&self, d: &DirectedHypergraph) -> bool {
        self.edges.iter().filter(|&&e| d.hyperedges()[e].sign.is_minus()).count() % 2 == 1
    }

    pub fn monomial(&self) -> Monomial {
        self.circulation.monomial()
    }
}

/// Every circuit of `d` with at most `max_edges` hyperedges.
///
/// Each circuit is grown from its smallest hyperedge by repeatedly filling
/// the first empty position at the least incomplete vertex, so it is found
/// exactly once.
pub fn enumerate_circuits(d: &DirectedHypergraph, max_edges: usize, limit: u64) -> Result<Vec<Circuit>, CircuitError> {
    let r = d.arity();
    let n = d.vertex_count();
    let mut by_slot = vec![vec![Vec::new(); r]; n];
    for (e, h) in d.hyperedges().iter().enumerate() {
        for (role, &v) in h.verts.iter().enumerate() {
            by_slot[v][role].push(e);
        }
    }
    let mut out = Vec::new();
    let mut states = 0u64;
    for seed in 0..d.len() {
        let mut filled = vec![vec![false; r]; n];
        let mut touched = vec![0usize; n];
        place(d, seed, &mut filled, &mut touched, true);
        let mut edges = vec![seed];
        grow(d, &by_slot, seed, max_edges, &mut filled, &mut touched, &mut edges, &mut out, &mut states, limit)?;
    }
    Ok(out)
}

fn place(d: &DirectedHypergraph, e: usize, filled: &mut [Vec<bool>], touched: &mut [usize], on: bool) {
    for (role, &v) in d.hyperedges()[e].verts.iter().enumerate() {
        filled[v][role] = on;
        if on {
            touched[v] += 1;
        } else {
            touched[v] -= 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn grow(
    d: &DirectedHypergraph,
    by_slot: &[Vec<Vec<usize>>],
    seed: usize,
    max_edges: usize,
    filled: &mut [Vec<bool>],
    touched: &mut [usize],
    edges: &mut Vec<usize>,
    out: &mut Vec<Circuit>,
    states: &mut u64,
    limit: u64,
) -> Result<(), CircuitError> {
    *states += 1;
    if *states > limit {
        return Err(CircuitError::TooManyStates { limit });
    }
    let r = d.arity();
    let slot = (0..filled.len())
        .filter(|&v| touched[v] > 0)
        .find_map(|v| filled[v].iter().position(|&f| !f).map(|role| (v, role)));
    let Some((v, role)) = slot else {
        out.push(Circuit::build(d, edges.clone()));
        return Ok(());
    };
    if edges.len() == max_edges {
        return Ok(());
    }
    for &e in &by_slot[v][role] {
        if e <= seed || edges.contains(&e) {
            continue;
        }
        let verts = &d.hyperedges()[e].verts;
        if (0..r).any(|i| filled[verts[i]][i]) {
            continue;
        }
        place(d, e, filled, touched, true);
        edges.push(e);
        grow(d, by_slot, seed, max_edges, filled, touched, edges, out, states, limit)?;
        edges.pop();
        place(d, e, filled, touched, false);
    }
    Ok(())
}

fn families(
    circuits: &[Circuit],
    cap: Option<u32>,
    d: &DirectedHypergraph,
    sign: impl Fn(&Circuit) -> bool,
    cover_all: bool,
) -> TruncatedPolynomial {
    let mut out = TruncatedPolynomial::zero();
    if let Some(c) = cap {
        out = out.with_cap(c);
    }
    let signs: Vec<bool> = circuits.iter().map(&sign).collect();
    let mut used = vec![false; d.vertex_count()];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        circuits: &[Circuit],
        signs: &[bool],
        used: &mut Vec<bool>,
        mono: Monomial,
        minus: bool,
        cap: Option<u32>,
        cover_all: bool,
        out: &mut TruncatedPolynomial,
    ) {
        if i == circuits.len() {
            if !cover_all || used.iter().all(|&u| u) {
                out.add_term(mono, if minus { BigInt::from(-1) } else { BigInt::from(1) });
            }
            return;
        }
        rec(i + 1, circuits, signs, used, mono.clone(), minus, cap, cover_all, out);
        let c = &circuits[i];
        if c.vertices.iter().any(|&v| used[v]) {
            return;
        }
        let next = mono.mul(&c.monomial());
        if cap.is_some_and(|k| next.degree() > k) {
            return;
        }
        for &v in &c.vertices {
            used[v] = true;
        }
        rec(i + 1, circuits, signs, used, next, minus ^ signs[i], cap, cover_all, out);
        for &v in &c.vertices {
            used[v] = false;
        }
    }
    rec(0, circuits, &signs, &mut used, Monomial::one(), false, cap, cover_all, &mut out);
    out
}

/// `sum_Q (-1)^{m(Q)} x^Q` over sets of vertex-disjoint circuits.
pub fn circuit_cover_expansion(d: &DirectedHypergraph, cap: Option<u32>, limit: u64) -> Result<TruncatedPolynomial, CircuitError> {
    let max_edges = cap.map_or(d.len(), |c| (c as usize).min(d.len()));
    let circuits = enumerate_circuits(d, max_edges, limit)?;
    Ok(families(&circuits, cap, d, |c| c.sign_identity_minus(d), false))
}

/// `det(A)` as a sum over vertex-disjoint circuit families covering every
/// vertex, each circuit signed by its connector cycles.
pub fn circuit_det_expansion(d: &DirectedHypergraph, limit: u64) -> Result<TruncatedPolynomial, CircuitError> {
    let circuits = enumerate_circuits(d, d.len(), limit)?;
    Ok(families(&circuits, None, d, |c| c.sign_det(d), true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulations::structure::check_structure;
    use crate::hyperalg::{adjacency_matrix_x, det_identity_minus, hyper_det_naive};
    use crate::circulations::walks::Digraph;

    fn latin(offset: usize, d: DirectedHypergraph) -> DirectedHypergraph {
        let mut d = d;
        for j in 0..4 {
            d = d.with(&[offset + j, offset + (j + 1) % 4, offset + (j + 2) % 4, offset + (j + 3) % 4]);
        }
        d
    }

    #[test]
    fn single_hyperedge_gives_one() {
        let d = DirectedHypergraph::with_vertices(4, 4).with(&[0, 1, 2, 3]);
        assert!(enumerate_circuits(&d, 4, DEFAULT_CIRCUIT_LIMIT).unwrap().is_empty());
        let p = circuit_cover_expansion(&d, Some(4), DEFAULT_CIRCUIT_LIMIT).unwrap();
        assert_eq!(p, TruncatedPolynomial::one().with_cap(4));
    }

    #[test]
    fn circuits_pass_structure_checks() {
        let d = latin(0, DirectedHypergraph::with_vertices(4, 4));
        let cs = enumerate_circuits(&d, 8, DEFAULT_CIRCUIT_LIMIT).unwrap();
        assert_eq!(cs.len(), 1);
        for c in &cs {
            assert!(check_structure(&d, &c.circulation).is_ok());
        }
        assert_eq!(circuit_cover_expansion(&d, None, DEFAULT_CIRCUIT_LIMIT).unwrap(), det_identity_minus(&d, 8).truncate(8));
    }

    #[test]
    fn two_disjoint_latin_blocks() {
        let d = latin(4, latin(0, DirectedHypergraph::with_vertices(4, 8)));
        let p = circuit_cover_expansion(&d, Some(8), DEFAULT_CIRCUIT_LIMIT).unwrap();
        assert_eq!(p, det_identity_minus(&d, 8));
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn det_variant_matches_naive_determinant() {
        let d = latin(0, DirectedHypergraph::with_vertices(4, 4));
        let naive = hyper_det_naive(&adjacency_matrix_x(&d)).unwrap();
        assert_eq!(circuit_det_expansion(&d, DEFAULT_CIRCUIT_LIMIT).unwrap(), naive);
    }

    #[test]
    fn det_variant_on_digraphs() {
        for d in [Digraph::complete(3), Digraph::new(3, vec![(0, 1), (1, 0), (1, 2), (2, 1), (2, 0)]).unwrap()] {
            let h = d.to_hypergraph();
            let naive = hyper_det_naive(&adjacency_matrix_x(&h)).unwrap();
            assert_eq!(circuit_det_expansion(&h, DEFAULT_CIRCUIT_LIMIT).unwrap(), naive);
            assert_eq!(circuit_cover_expansion(&h, None, DEFAULT_CIRCUIT_LIMIT).unwrap(), det_identity_minus(&h, 6).truncate(6));
        }
    }
}
