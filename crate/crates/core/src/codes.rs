//! Binary linear codes, F2 linear algebra and brute-force weight enumerators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::poly::WeightSeries;

/// Default ceiling on the dimension of an enumerated code (2^24 codewords).
pub const DEFAULT_MAX_DIM: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("basis vector {index} has length {got}, expected {expected}")]
    LengthMismatch { index: usize, got: usize, expected: usize },
    #[error("basis vectors are linearly dependent over F2")]
    DependentBasis,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("enumeration of 2^{dim} codewords exceeds the limit 2^{limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("weights are too large for exact enumeration")]
    WeightOverflow,
    #[error("graph: {0}")]
    Graph(String),
}

/// A vector over F2 packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &F2Vector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Dense matrix over F2, stored by rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vector>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            data: vec![F2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            m.data[r] = F2Vector::from_bits(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &F2Vector {
        &self.data[r]
    }

    /// Reduced row echelon form; returns the reduced rows and pivot columns.
    fn rref(&self) -> (Vec<F2Vector>, Vec<usize>) {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn mul_vec(&self, x: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            let parity = row
                .words
                .iter()
                .zip(&x.words)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>();
            out.set(r, parity % 2 == 1);
        }
        out
    }
}

/// Basis of `{x : M x = 0}` with one vector per free column, of size
/// `cols - rank(M)`.
pub fn kernel_basis(m: &BinaryMatrix) -> Vec<F2Vector> {
    let (rows, pivots) = m.rref();
    let mut is_pivot = vec![None; m.cols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    (0..m.cols)
        .filter(|&c| is_pivot[c].is_none())
        .map(|free| {
            let mut v = F2Vector::zeros(m.cols);
            v.set(free, true);
            for (r, &pc) in pivots.iter().enumerate() {
                if rows[r].get(free) {
                    v.set(pc, true);
                }
            }
            v
        })
        .collect()
}

/// A binary linear code given by a generator basis, with rational
/// coordinate weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    n: usize,
    basis: Vec<F2Vector>,
    weights: Vec<BigRational>,
}

impl Code {
    pub fn new(n: usize, basis: Vec<F2Vector>, weights: Vec<BigRational>) -> Result<Self, CodeError> {
        for (index, b) in basis.iter().enumerate() {
            if b.len() != n {
                return Err(CodeError::LengthMismatch { index, got: b.len(), expected: n });
            }
        }
        if weights.len() != n {
            return Err(CodeError::WeightCount { expected: n, got: weights.len() });
        }
        let mut m = BinaryMatrix::zeros(basis.len(), n);
        m.data = basis.clone();
        if m.rank() != basis.len() {
            return Err(CodeError::DependentBasis);
        }
        Ok(Code { n, basis, weights })
    }

    pub fn with_unit_weights(n: usize, basis: Vec<F2Vector>) -> Result<Self, CodeError> {
        Self::new(n, basis, vec![BigRational::one(); n])
    }

    /// The kernel of `m` as a code on its columns.
    pub fn kernel_of(m: &BinaryMatrix, weights: Vec<BigRational>) -> Result<Self, CodeError> {
        Self::new(m.cols(), kernel_basis(m), weights)
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[F2Vector] {
        &self.basis
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }
}

/// Scales rational weights to integers over their common denominator.
fn scaled_weights(weights: &[BigRational]) -> Result<(Vec<i64>, BigInt), CodeError> {
    let denom = weights
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled: Option<Vec<i64>> = weights
        .iter()
        .map(|w| (w.numer() * (&denom / w.denom())).to_i64())
        .collect();
    let scaled = scaled.ok_or(CodeError::WeightOverflow)?;
    let bound: i128 = scaled.iter().map(|&w| (w as i128).abs()).sum();
    if bound > i64::MAX as i128 {
        return Err(CodeError::WeightOverflow);
    }
    Ok((scaled, denom))
}

fn collect_series(counts: BTreeMap<i64, u64>, denom: &BigInt) -> WeightSeries {
    let mut s = WeightSeries::zero();
    for (w, c) in counts {
        s.add_term(BigRational::new(w.into(), denom.clone()), c.into());
    }
    s
}

/// Gray-code walk over the span of `basis` shifted by `start`, counting
/// codeword weights.
fn gray_walk(start: &F2Vector, start_weight: i64, basis: &[F2Vector], w: &[i64], out: &mut HashMap<i64, u64>) {
    let mut word = start.clone();
    let mut weight = start_weight;
    *out.entry(weight).or_insert(0) += 1;
    let total: u64 = 1 << basis.len();
    for i in 1..total {
        let b = &basis[i.trailing_zeros() as usize];
        for j in b.ones() {
            if word.get(j) {
                weight -= w[j];
            } else {
                weight += w[j];
            }
        }
        word.xor_assign(b);
        *out.entry(weight).or_insert(0) += 1;
    }
}

/// `sum_{c in C} z^{w(c)}` by enumerating all codewords.
pub fn weight_enumerator(code: &Code) -> Result<WeightSeries, CodeError> {
    weight_enumerator_with_limit(code, DEFAULT_MAX_DIM)
}

pub fn weight_enumerator_with_limit(code: &Code, max_dim: usize) -> Result<WeightSeries, CodeError> {
    let dim = code.dim();
    if dim > max_dim || dim >= 63 {
        return Err(CodeError::TooLarge { dim, limit: max_dim });
    }
    let (w, denom) = scaled_weights(&code.weights)?;
    // the top `split` basis vectors select independent chunks
    let split = dim.saturating_sub(10).min(8);
    let (low, high) = code.basis.split_at(dim - split);
    let counts = (0u64..1 << split)
        .into_par_iter()
        .map(|mask| {
            let mut start = F2Vector::zeros(code.n);
            for (i, b) in high.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    start.xor_assign(b);
                }
            }
            let start_weight = start.ones().map(|j| w[j]).sum();
            let mut local = HashMap::new();
            gray_walk(&start, start_weight, low, &w, &mut local);
            local.into_iter().collect::<BTreeMap<_, _>>()
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(collect_series(counts, &denom))
}

/// A simple graph with named vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Validates simplicity: no loops, no repeated edges, endpoints in range.
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self, CodeError> {
        let n = vertices.len();
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(CodeError::Graph(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(CodeError::Graph(format!("loop at vertex {}", vertices[u])));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(CodeError::Graph(format!(
                    "repeated edge {{{}, {}}}",
                    vertices[u], vertices[v]
                )));
            }
        }
        Ok(Graph { vertices, edges })
    }

    /// Graph on vertices `0..n` named by their index.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, CodeError> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges.to_vec())
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The `V x E` incidence matrix.
    pub fn incidence_matrix(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.vertices.len(), self.edges.len());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            m.set(u, e, true);
            m.set(v, e, true);
        }
        m
    }

    /// The cycle space as a code on the edges.
    pub fn cycle_space(&self, weights: Vec<BigRational>) -> Result<Code, CodeError> {
        Code::kernel_of(&self.incidence_matrix(), weights)
    }
}

/// `sum_{E' even} z^{w(E')}` by scanning every edge subset directly.
pub fn even_set_enumerator(g: &Graph, weights: &[BigRational]) -> Result<WeightSeries, CodeError> {
    even_set_enumerator_with_limit(g, weights, DEFAULT_MAX_DIM)
}

pub fn even_set_enumerator_with_limit(
    g: &Graph,
    weights: &[BigRational],
    max_edges: usize,
) -> Result<WeightSeries, CodeError> {
    let m = g.edges.len();
    if weights.len() != m {
        return Err(CodeError::WeightCount { expected: m, got: weights.len() });
    }
    if m > max_edges || m >= 63 {
        return Err(CodeError::TooLarge { dim: m, limit: max_edges });
    }
    let (w, denom) = scaled_weights(weights)?;
    let n = g.vertices.len();
    let mut counts = BTreeMap::new();
    let mut parity = vec![false; n];
    for subset in 0u64..1 << m {
        parity.iter_mut().for_each(|p| *p = false);
        let mut weight = 0i64;
        for (e, &(u, v)) in g.edges.iter().enumerate() {
            if subset >> e & 1 == 1 {
                parity[u] ^= true;
                parity[v] ^= true;
                weight += w[e];
            }
        }
        if parity.iter().all(|&p| !p) {
            *counts.entry(weight).or_insert(0u64) += 1;
        }
    }
    Ok(collect_series(counts, &denom))
}

/// Unit weights of the given length.
pub fn unit_weights(n: usize) -> Vec<BigRational> {
    vec![BigRational::one(); n]
}

#[doc(hidden)]
pub fn zero_weights(n: usize) -> Vec<BigRational> {
    vec![BigRational::zero(); n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn k4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Every `x` with `M x = 0`, by enumeration.
    fn kernel_by_enumeration(m: &BinaryMatrix) -> Vec<F2Vector> {
        (0u64..1 << m.cols())
            .map(|mask| {
                let bits: Vec<u8> = (0..m.cols()).map(|i| (mask >> i & 1) as u8).collect();
                F2Vector::from_bits(&bits)
            })
            .filter(|x| m.mul_vec(x).is_zero())
            .collect()
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        assert!(kernel_basis(&BinaryMatrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&BinaryMatrix::zeros(2, 3)).len(), 3);
    }

    #[test]
    fn kernel_of_triangle_incidence() {
        let m = triangle().incidence_matrix();
        let brute = kernel_by_enumeration(&m);
        assert_eq!(brute.len(), 2);
        let basis = kernel_basis(&m);
        assert_eq!(basis, vec![F2Vector::from_bits(&[1, 1, 1])]);
    }

    #[test]
    fn weight_enumerator_small_codes() {
        let zero = Code::with_unit_weights(5, vec![]).unwrap();
        assert_eq!(weight_enumerator(&zero).unwrap(), WeightSeries::one());

        let k3 = triangle().cycle_space(unit_weights(3)).unwrap();
        assert_eq!(weight_enumerator(&k3).unwrap().to_string(), "1 + z^3");

        let c = Code::with_unit_weights(
            3,
            vec![F2Vector::from_bits(&[1, 1, 0]), F2Vector::from_bits(&[0, 1, 1])],
        )
        .unwrap();
        assert_eq!(weight_enumerator(&c).unwrap().to_string(), "1 + 3*z^2");
    }

    #[test]
    fn rational_weights() {
        let half = BigRational::new(1.into(), 2.into());
        let c = Code::new(2, vec![F2Vector::from_bits(&[1, 1])], vec![half.clone(), BigRational::one()])
            .unwrap();
        assert_eq!(weight_enumerator(&c).unwrap().to_string(), "1 + z^(3/2)");
    }

    #[test]
    fn code_validation() {
        let v = F2Vector::from_bits(&[1, 0, 1]);
        assert_eq!(
            Code::with_unit_weights(3, vec![v.clone(), v.clone()]),
            Err(CodeError::DependentBasis)
        );
        assert!(matches!(
            Code::with_unit_weights(4, vec![v]),
            Err(CodeError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn dimension_guard() {
        let basis: Vec<F2Vector> = (0..5)
            .map(|i| {
                let mut v = F2Vector::zeros(5);
                v.set(i, true);
                v
            })
            .collect();
        let c = Code::with_unit_weights(5, basis).unwrap();
        assert_eq!(
            weight_enumerator_with_limit(&c, 4),
            Err(CodeError::TooLarge { dim: 5, limit: 4 })
        );
        assert_eq!(weight_enumerator(&c).unwrap().total(), BigInt::from(32));
    }

    #[test]
    fn even_sets() {
        assert_eq!(even_set_enumerator(&triangle(), &unit_weights(3)).unwrap().to_string(), "1 + z^3");
        let tree = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(even_set_enumerator(&tree, &unit_weights(3)).unwrap(), WeightSeries::one());
        assert_eq!(
            even_set_enumerator(&k4(), &unit_weights(6)).unwrap().to_string(),
            "1 + 4*z^3 + 3*z^4"
        );
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::from_edges(2, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn large_code_is_split_across_chunks() {
        // dimension 14 exercises the chunked walk
        let n = 20;
        let basis: Vec<F2Vector> = (0..14)
            .map(|i| {
                let mut v = F2Vector::zeros(n);
                v.set(i, true);
                v.set(i + 6, true);
                v
            })
            .collect();
        let c = Code::with_unit_weights(n, basis.clone()).unwrap();
        let fast = weight_enumerator(&c).unwrap();
        // direct enumeration
        let mut counts = BTreeMap::new();
        for mask in 0u64..1 << basis.len() {
            let mut word = F2Vector::zeros(n);
            for (i, b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    word.xor_assign(b);
                }
            }
            *counts.entry(word.weight() as i64).or_insert(0u64) += 1;
        }
        assert_eq!(fast, collect_series(counts, &BigInt::one()));
    }
}
