//! k-partite hypergraphs, directed hypergraphs and perfect matchings.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::codes::BinaryMatrix;
use crate::poly::WeightSeries;
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge {edge} has {got} vertices, expected {expected}")]
    EdgeArity { edge: usize, got: usize, expected: usize },
    #[error("edge {edge} meets part {part} {count} times")]
    NotPartite { edge: usize, part: usize, count: usize },
    #[error("hyperedge {edge} repeats a vertex")]
    RepeatedVertex { edge: usize },
    #[error("hyperedge {edge} duplicates hyperedge {other}")]
    DuplicateHyperedge { edge: usize, other: usize },
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("matching: {0}")]
    Matching(String),
}

/// An edge of a k-partite hypergraph: one vertex per part, in part order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperEdge {
    pub verts: Vec<usize>,
    pub weight: BigRational,
    pub name: Option<String>,
}

/// `H = (V_1, ..., V_k, E)` with weighted edges. Vertices are numbered
/// globally, part by part, in input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPartiteHypergraph {
    parts: Vec<Vec<String>>,
    offsets: Vec<usize>,
    part_of: Vec<usize>,
    index: HashMap<String, usize>,
    edges: Vec<HyperEdge>,
    incident: Vec<Vec<usize>>,
}

impl KPartiteHypergraph {
    pub fn new(parts: Vec<Vec<String>>) -> Result<Self, HypergraphError> {
        let mut offsets = Vec::with_capacity(parts.len());
        let mut part_of = Vec::new();
        let mut index = HashMap::new();
        for (p, names) in parts.iter().enumerate() {
            offsets.push(part_of.len());
            for name in names {
                if index.insert(name.clone(), part_of.len()).is_some() {
                    return Err(HypergraphError::DuplicateVertex(name.clone()));
                }
                part_of.push(p);
            }
        }
        let n = part_of.len();
        Ok(KPartiteHypergraph {
            parts,
            offsets,
            part_of,
            index,
            edges: Vec::new(),
            incident: vec![Vec::new(); n],
        })
    }

    /// Adds an edge given by global vertex ids in any order; returns its index.
    pub fn add_edge(&mut self, verts: &[usize], weight: BigRational, name: Option<String>) -> Result<usize, HypergraphError> {
        let k = self.k();
        let edge = self.edges.len();
        if verts.len() != k {
            return Err(HypergraphError::EdgeArity { edge, got: verts.len(), expected: k });
        }
        let mut ordered = vec![usize::MAX; k];
        for &v in verts {
            let p = *self
                .part_of
                .get(v)
                .ok_or_else(|| HypergraphError::UnknownVertex(v.to_string()))?;
            if ordered[p] != usize::MAX {
                return Err(HypergraphError::NotPartite { edge, part: p, count: 2 });
            }
            ordered[p] = v;
        }
        if let Some(part) = ordered.iter().position(|&v| v == usize::MAX) {
            return Err(HypergraphError::NotPartite { edge, part, count: 0 });
        }
        for &v in &ordered {
            self.incident[v].push(edge);
        }
        self.edges.push(HyperEdge { verts: ordered, weight, name });
        Ok(edge)
    }

    pub fn add_edge_by_names(&mut self, names: &[&str], weight: BigRational) -> Result<usize, HypergraphError> {
        let ids = names
            .iter()
            .map(|n| self.vertex_id(n).ok_or_else(|| HypergraphError::UnknownVertex(n.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        self.add_edge(&ids, weight, None)
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<String>] {
        &self.parts
    }

    pub fn part_size(&self, p: usize) -> usize {
        self.parts[p].len()
    }

    pub fn vertex_count(&self) -> usize {
        self.part_of.len()
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Global id of the `i`-th vertex of part `p`.
    pub fn global(&self, p: usize, i: usize) -> usize {
        self.offsets[p] + i
    }

    /// Part index and position within the part.
    pub fn locate(&self, v: usize) -> (usize, usize) {
        let p = self.part_of[v];
        (p, v - self.offsets[p])
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        let (p, i) = self.locate(v);
        &self.parts[p][i]
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &HyperEdge {
        &self.edges[e]
    }

    pub fn edges_at(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn set_weight(&mut self, e: usize, w: BigRational) {
        self.edges[e].weight = w;
    }

    pub fn edge_label(&self, e: usize) -> String {
        self.edges[e].name.clone().unwrap_or_else(|| format!("e{e}"))
    }

    pub fn has_equal_parts(&self) -> bool {
        self.parts.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// True iff every pair of distinct edges shares at most one vertex.
    pub fn is_almost_disjoint(&self) -> bool {
        self.first_overlap().is_none()
    }

    /// A pair of edges sharing two or more vertices, if any.
    pub fn first_overlap(&self) -> Option<(usize, usize)> {
        let mut shared: HashMap<(usize, usize), u32> = HashMap::new();
        for inc in &self.incident {
            for (i, &a) in inc.iter().enumerate() {
                for &b in &inc[i + 1..] {
                    let c = shared.entry((a.min(b), a.max(b))).or_insert(0);
                    *c += 1;
                    if *c >= 2 {
                        return Some((a.min(b), a.max(b)));
                    }
                }
            }
        }
        None
    }

    /// The `V x E` incidence matrix.
    pub fn incidence_matrix(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.vertex_count(), self.edges.len());
        for (e, edge) in self.edges.iter().enumerate() {
            for &v in &edge.verts {
                m.set(v, e, true);
            }
        }
        m
    }

    pub fn edge_weights(&self) -> Vec<BigRational> {
        self.edges.iter().map(|e| e.weight.clone()).collect()
    }

    /// Checks that `m` is a perfect matching of this hypergraph.
    pub fn check_perfect(&self, m: &Matching) -> Result<(), HypergraphError> {
        let mut covered = vec![false; self.vertex_count()];
        for &e in m.edges() {
            let edge = self.edges.get(e).ok_or(HypergraphError::EdgeOutOfRange(e))?;
            for &v in &edge.verts {
                if std::mem::replace(&mut covered[v], true) {
                    return Err(HypergraphError::Matching(format!(
                        "vertex `{}` covered twice",
                        self.vertex_name(v)
                    )));
                }
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(HypergraphError::Matching(format!(
                "vertex `{}` not covered",
                self.vertex_name(v)
            )));
        }
        Ok(())
    }

    /// Every perfect matching exactly once, branching on the least-index
    /// uncovered vertex and trying its edges in input order.
    pub fn perfect_matchings(&self) -> PerfectMatchings<'_> {
        PerfectMatchings::new(self.vertex_count(), &self.incident, &self.edges)
    }

    pub fn weight_of(&self, m: &Matching) -> BigRational {
        m.edges().iter().map(|&e| self.edges[e].weight.clone()).sum()
    }

    /// `sum_M z^{w(M)}` over perfect matchings `M`.
    pub fn matching_enumerator(&self) -> WeightSeries {
        let mut s = WeightSeries::zero();
        for m in self.perfect_matchings() {
            s.add_term(self.weight_of(&m), BigInt::one());
        }
        s
    }
}

/// A set of edge indices, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching(Vec<usize>);

impl Matching {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Matching(edges)
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.binary_search(&e).is_ok()
    }
}


struct Frame {
    vertex: usize,
    next: usize,
    current: Option<usize>,
}

/// Streaming perfect-matching search over an explicit incidence structure.
pub struct PerfectMatchings<'a> {
    incident: &'a [Vec<usize>],
    edges: &'a [HyperEdge],
    covered: Vec<u64>,
    n: usize,
    chosen: Vec<usize>,
    stack: Vec<Frame>,
    descend: bool,
    done: bool,
}

impl<'a> PerfectMatchings<'a> {
    pub(crate) fn new(n: usize, incident: &'a [Vec<usize>], edges: &'a [HyperEdge]) -> Self {
        PerfectMatchings {
            incident,
            edges,
            covered: vec![0; n.div_ceil(64).max(1)],
            n,
            chosen: Vec::new(),
            stack: Vec::new(),
            descend: true,
            done: false,
        }
    }

    fn is_covered(&self, v: usize) -> bool {
        self.covered[v / 64] >> (v % 64) & 1 == 1
    }

    fn toggle(&mut self, e: usize) {
        for &v in &self.edges[e].verts {
            self.covered[v / 64] ^= 1 << (v % 64);
        }
    }

    fn least_uncovered(&self) -> Option<usize> {
        for (wi, &w) in self.covered.iter().enumerate() {
            if w != u64::MAX {
                let v = wi * 64 + (!w).trailing_zeros() as usize;
                return (v < self.n).then_some(v);
            }
        }
        None
    }
}

impl Iterator for PerfectMatchings<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        loop {
            if self.done {
                return None;
            }
            if self.descend {
                match self.least_uncovered() {
                    None => {
                        self.descend = false;
                        return Some(Matching::new(self.chosen.clone()));
                    }
                    Some(v) => self.stack.push(Frame { vertex: v, next: 0, current: None }),
                }
            }
            let Some(top) = self.stack.last_mut() else {
                self.done = true;
                return None;
            };
            let (vertex, start, prev) = (top.vertex, top.next, top.current.take());
            if let Some(e) = prev {
                self.toggle(e);
                self.chosen.pop();
            }
            let candidates = &self.incident[vertex];
            let found = (start..candidates.len()).find(|&i| {
                self.edges[candidates[i]].verts.iter().all(|&u| !self.is_covered(u))
            });
            match found {
                Some(i) => {
                    let e = candidates[i];
                    self.toggle(e);
                    self.chosen.push(e);
                    let top = self.stack.last_mut().unwrap();
                    top.next = i + 1;
                    top.current = Some(e);
                    self.descend = true;
                }
                None => {
                    self.stack.pop();
                    self.descend = false;
                }
            }
        }
    }
}

/// A directed hyperedge: an ordered tuple of distinct vertices with a
/// rational weight and a sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedHyperedge {
    pub verts: Vec<usize>,
    pub weight: BigRational,
    pub sign: Sign,
}

/// `D = (V, A)` with linearly ordered vertices (input order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedHypergraph {
    arity: usize,
    vertices: Vec<String>,
    hyperedges: Vec<DirectedHyperedge>,
}

impl DirectedHypergraph {
    pub fn new(arity: usize, vertices: Vec<String>) -> Result<Self, HypergraphError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return Err(HypergraphError::DuplicateVertex(v.clone()));
            }
        }
        Ok(DirectedHypergraph { arity, vertices, hyperedges: Vec::new() })
    }

    /// Vertices named `0..n`.
    pub fn with_vertices(arity: usize, n: usize) -> Self {
        Self::new(arity, (0..n).map(|i| i.to_string()).collect()).unwrap()
    }

    pub fn push(&mut self, verts: Vec<usize>, weight: BigRational, sign: Sign) -> Result<usize, HypergraphError> {
        let edge = self.hyperedges.len();
        if verts.len() != self.arity {
            return Err(HypergraphError::EdgeArity { edge, got: verts.len(), expected: self.arity });
        }
        if let Some(&v) = verts.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(HypergraphError::UnknownVertex(v.to_string()));
        }
        let distinct: BTreeSet<_> = verts.iter().collect();
        if distinct.len() != verts.len() {
            return Err(HypergraphError::RepeatedVertex { edge });
        }
        if let Some(other) = self.hyperedges.iter().position(|h| h.verts == verts) {
            return Err(HypergraphError::DuplicateHyperedge { edge, other });
        }
        self.hyperedges.push(DirectedHyperedge { verts, weight, sign });
        Ok(edge)
    }

    /// Adds an unweighted, positive hyperedge; panics on invalid input.
    pub fn with(mut self, verts: &[usize]) -> Self {
        self.push(verts.to_vec(), BigRational::zero(), Sign::Plus).expect("valid hyperedge");
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn hyperedges(&self) -> &[DirectedHyperedge] {
        &self.hyperedges
    }

    pub fn len(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperedges.is_empty()
    }

    /// The same hypergraph with every sign flipped.
    pub fn negated(&self) -> Self {
        let mut d = self.clone();
        for h in &mut d.hyperedges {
            h.sign = -h.sign;
        }
        d
    }

    pub fn has_signs(&self) -> bool {
        self.hyperedges.iter().any(|h| h.sign.is_minus())
    }
}

/// Two small reference instances used by tests, examples and the CLI.
pub mod fixtures {
    use super::*;

    fn parts(k: usize, n: usize) -> Vec<Vec<String>> {
        let letters = ["a", "b", "c", "d"];
        (0..k)
            .map(|p| (1..=n).map(|i| format!("{}{i}", letters[p])).collect())
            .collect()
    }

    /// Single edge over three parts of size one.
    pub fn fixture_a() -> (KPartiteHypergraph, Matching) {
        let mut h = KPartiteHypergraph::new(parts(3, 1)).unwrap();
        h.add_edge_by_names(&["a1", "b1", "c1"], BigRational::zero()).unwrap();
        (h, Matching::new(vec![0]))
    }

    /// Three parts of size three; edges p1, p2, p3 (the matching) and e4, e5, e6
    /// with weights 1, 1, 0.
    pub fn fixture_b() -> (KPartiteHypergraph, Matching) {
        let mut h = KPartiteHypergraph::new(parts(3, 3)).unwrap();
        let triples = [(1, 1, 1, 0), (2, 2, 2, 0), (3, 3, 3, 0), (1, 2, 3, 1), (2, 3, 1, 1), (3, 1, 2, 0)];
        for (i, &(a, b, c, w)) in triples.iter().enumerate() {
            let names = [format!("a{a}"), format!("b{b}"), format!("c{c}")];
            let ids: Vec<usize> = names.iter().map(|n| h.vertex_id(n).unwrap()).collect();
            let label = if i < 3 { format!("p{}", i + 1) } else { format!("e{}", i + 1) };
            h.add_edge(&ids, BigRational::from_integer(w.into()), Some(label)).unwrap();
        }
        (h, Matching::new(vec![0, 1, 2]))
    }
}
