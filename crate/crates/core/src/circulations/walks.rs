//! Closed walks of digraphs and the truncated two-dimensional product.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::DirectedHypergraph;
use crate::poly::{product_trunc, Monomial, TruncatedPolynomial, VarId};
use crate::Sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DigraphError {
    #[error("arc {arc} is a loop at vertex {vertex}")]
    Loop { arc: usize, vertex: usize },
    #[error("arc {arc} uses vertex {vertex} outside 0..{n}")]
    UnknownVertex { arc: usize, vertex: usize, n: usize },
    #[error("arcs {first} and {second} are parallel")]
    Parallel { first: usize, second: usize },
}

/// A loop-free digraph without parallel arcs. Arc `i` carries variable `x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    pub vertices: usize,
    /// `(tail, head)`.
    pub arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(vertices: usize, arcs: Vec<(usize, usize)>) -> Result<Self, DigraphError> {
        let d = Digraph { vertices, arcs };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), DigraphError> {
        for (arc, &(u, v)) in self.arcs.iter().enumerate() {
            for w in [u, v] {
                if w >= self.vertices {
                    return Err(DigraphError::UnknownVertex { arc, vertex: w, n: self.vertices });
                }
            }
            if u == v {
                return Err(DigraphError::Loop { arc, vertex: u });
            }
            if let Some(first) = self.arcs[..arc].iter().position(|&a| a == (u, v)) {
                return Err(DigraphError::Parallel { first, second: arc });
            }
        }
        Ok(())
    }

    /// Every arc `u -> v` for `u != v` on `n` vertices, in lexicographic order.
    pub fn complete(n: usize) -> Self {
        let arcs = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        Digraph { vertices: n, arcs }
    }

    /// The arity-2 directed hypergraph with hyperedge `i = (head, tail)` of
    /// arc `i`, so that its adjacency matrix has `x_i` in row `tail`.
    pub fn to_hypergraph(&self) -> DirectedHypergraph {
        let mut d = DirectedHypergraph::with_vertices(2, self.vertices);
        for &(u, v) in &self.arcs {
            d.push(vec![v, u], BigRational::zero(), Sign::Plus).expect("validated digraph");
        }
        d
    }
}

/// A closed walk stored as its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClosedWalk {
    arcs: Vec<usize>,
}

impl ClosedWalk {
    /// Canonicalizes a cyclic arc sequence; `None` if it does not chain.
    pub fn new(d: &Digraph, arcs: &[usize]) -> Option<Self> {
        if arcs.is_empty() {
            return None;
        }
        for i in 0..arcs.len() {
            let a = *d.arcs.get(arcs[i])?;
            let b = *d.arcs.get(arcs[(i + 1) % arcs.len()])?;
            if a.1 != b.0 {
                return None;
            }
        }
        Some(ClosedWalk { arcs: least_rotation(arcs) })
    }

    pub fn arcs(&self) -> &[usize] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Not a repetition of a shorter sequence.
    pub fn is_aperiodic(&self) -> bool {
        smallest_period(&self.arcs) == self.arcs.len()
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::product_of(self.arcs.iter().map(|&a| a as VarId))
    }
}

impl fmt::Display for ClosedWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.arcs.iter().map(|a| format!("a{a}")).collect();
        write!(f, "({})", parts.join(" "))
    }
}

pub(crate) fn least_rotation<T: Ord + Clone>(s: &[T]) -> Vec<T> {
    (0..s.len())
        .map(|i| s[i..].iter().chain(&s[..i]).cloned().collect::<Vec<T>>())
        .min()
        .unwrap_or_default()
}

pub(crate) fn smallest_period<T: PartialEq>(s: &[T]) -> usize {
    let n = s.len();
    (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| s[i] == s[i - p])).unwrap_or(n)
}

/// All aperiodic closed walks with at most `max_len` arcs, sorted.
///
/// A canonical walk starts with its smallest arc id, so the search roots at
/// each arc and only extends with arcs of larger or equal id.
pub fn enumerate_aperiodic_walks(d: &Digraph, max_len: usize) -> Vec<ClosedWalk> {
    let mut out_arcs = vec![Vec::new(); d.vertices];
    for (i, &(u, _)) in d.arcs.iter().enumerate() {
        out_arcs[u].push(i);
    }
    let mut found = Vec::new();
    for root in 0..d.arcs.len() {
        let start = d.arcs[root].0;
        let mut seq = vec![root];
        extend(d, &out_arcs, root, start, max_len, &mut seq, &mut found);
    }
    found.sort();
    found
}

fn extend(
    d: &Digraph,
    out_arcs: &[Vec<usize>],
    root: usize,
    start: usize,
    max_len: usize,
    seq: &mut Vec<usize>,
    found: &mut Vec<ClosedWalk>,
) {
    let here = d.arcs[*seq.last().unwrap()].1;
    if here == start {
        let w = least_rotation(seq);
        if w == *seq && smallest_period(seq) == seq.len() {
            found.push(ClosedWalk { arcs: w });
        }
    }
    if seq.len() == max_len {
        return;
    }
    for &a in &out_arcs[here] {
        if a >= root {
            seq.push(a);
            extend(d, out_arcs, root, start, max_len, seq, found);
            seq.pop();
        }
    }
}

/// `prod_W (1 - x^W)` over aperiodic closed walks, truncated at degree `max_len`.
pub fn is2_truncated(d: &Digraph, max_len: u32) -> TruncatedPolynomial {
    let factors: Vec<(i8, Monomial)> =
        enumerate_aperiodic_walks(d, max_len as usize).iter().map(|w| (-1, w.monomial())).collect();
    product_trunc(&factors, max_len).expect("walks have positive length")
}
