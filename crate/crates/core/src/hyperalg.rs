//! Determinants and permanents of sparse multi-index matrices.
//!
//! A matrix with `axes` index sets of equal size `n` is stored as a map from
//! index tuples to signed payloads. The last axis plays the role of the row:
//! `det M = sum over bijections a_1..a_{axes-1} from the last index set to the
//! other axes of prod sgn(a_j) * prod_i M[a_1(i), .., a_{axes-1}(i), i]`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::hypergraph::{DirectedHypergraph, KPartiteHypergraph};
use crate::poly::{Monomial, TruncatedPolynomial, VarId, WeightSeries};
use crate::sign::{permutation_sign, Sign};

/// Largest `n` accepted by the naive expansions.
pub const NAIVE_MAX_N: usize = 5;
/// Largest number of bijection tuples the naive expansions will visit.
pub const NAIVE_MAX_TERMS: u128 = 20_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgError {
    #[error("naive expansion too large: n = {n}, {axes} axes")]
    TooLarge { n: usize, axes: usize },
    #[error("index {index:?} out of range for size {n}")]
    OutOfRange { index: Vec<usize>, n: usize },
    #[error("index {index:?} has {got} coordinates, expected {expected}")]
    Arity { index: Vec<usize>, got: usize, expected: usize },
    #[error("parts have unequal sizes")]
    UnequalParts,
    #[error("diagonal entry at {0} is not a unit")]
    NonUnitDiagonal(usize),
}

/// Something that can sit in a matrix entry and be multiplied along a term.
pub trait Payload: Clone + PartialEq + Debug + Send + Sync {
    type Sum: Clone + PartialEq + Debug + Send;

    fn unit() -> Self;
    fn times(&self, other: &Self) -> Self;
    /// Degree used for truncation; zero for payloads that are never truncated.
    fn degree(&self) -> u32 {
        0
    }
    fn empty_sum(cap: Option<u32>) -> Self::Sum;
    fn add_to(sum: &mut Self::Sum, term: &Self, sign: Sign);
    fn merge(into: &mut Self::Sum, other: Self::Sum);
}

impl Payload for Monomial {
    type Sum = TruncatedPolynomial;

    fn unit() -> Self {
        Monomial::one()
    }

    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn degree(&self) -> u32 {
        Monomial::degree(self)
    }

    fn empty_sum(cap: Option<u32>) -> TruncatedPolynomial {
        let mut p = TruncatedPolynomial::zero();
        p.set_cap(cap);
        p
    }

    fn add_to(sum: &mut TruncatedPolynomial, term: &Self, sign: Sign) {
        sum.add_term(term.clone(), BigInt::from(sign.as_i8()));
    }

    fn merge(into: &mut TruncatedPolynomial, other: TruncatedPolynomial) {
        *into = into.add(&other);
    }
}

/// `z^q` for a rational `q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZPower(pub BigRational);

impl Payload for ZPower {
    type Sum = WeightSeries;

    fn unit() -> Self {
        ZPower(BigRational::zero())
    }

    fn times(&self, other: &Self) -> Self {
        ZPower(&self.0 + &other.0)
    }

    fn empty_sum(_cap: Option<u32>) -> WeightSeries {
        WeightSeries::zero()
    }

    fn add_to(sum: &mut WeightSeries, term: &Self, sign: Sign) {
        sum.add_term(term.0.clone(), BigInt::from(sign.as_i8()));
    }

    fn merge(into: &mut WeightSeries, other: WeightSeries) {
        *into = into.add(&other);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry<P> {
    pub sign: Sign,
    pub payload: P,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseKMatrix<P> {
    axes: usize,
    n: usize,
    entries: BTreeMap<Vec<usize>, Entry<P>>,
}

impl<P: Payload> SparseKMatrix<P> {
    pub fn new(axes: usize, n: usize) -> Self {
        assert!(axes >= 2, "need at least two axes");
        SparseKMatrix { axes, n, entries: BTreeMap::new() }
    }

    pub fn identity(axes: usize, n: usize) -> Self {
        let mut m = Self::new(axes, n);
        for i in 0..n {
            m.entries.insert(vec![i; axes], Entry { sign: Sign::Plus, payload: P::unit() });
        }
        m
    }

    /// Sets an entry, replacing any previous one.
    pub fn insert(&mut self, index: Vec<usize>, sign: Sign, payload: P) -> Result<(), AlgError> {
        if index.len() != self.axes {
            return Err(AlgError::Arity { got: index.len(), expected: self.axes, index });
        }
        if index.iter().any(|&i| i >= self.n) {
            return Err(AlgError::OutOfRange { index, n: self.n });
        }
        self.entries.insert(index, Entry { sign, payload });
        Ok(())
    }

    pub fn axes(&self) -> usize {
        self.axes
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: &[usize]) -> Option<&Entry<P>> {
        self.entries.get(index)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Entry<P>)> {
        self.entries.iter()
    }

    pub fn entries_mut(&mut self) -> impl Iterator<Item = (&Vec<usize>, &mut Entry<P>)> {
        self.entries.iter_mut()
    }

    /// Negates every entry whose last coordinate is `row`.
    pub fn flip_hyper_row(&self, row: usize) -> Self {
        let mut m = self.clone();
        for (idx, e) in m.entries.iter_mut() {
            if idx[self.axes - 1] == row {
                e.sign = -e.sign;
            }
        }
        m
    }

    pub fn negated(&self) -> Self {
        let mut m = self.clone();
        for e in m.entries.values_mut() {
            e.sign = -e.sign;
        }
        m
    }

    /// `I + self`; diagonal entries must be absent.
    pub fn plus_identity(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            let prev = m.entries.insert(vec![i; self.axes], Entry { sign: Sign::Plus, payload: P::unit() });
            assert!(prev.is_none(), "diagonal entry already present");
        }
        m
    }

    pub fn map_payload<Q: Payload>(&self, f: impl Fn(&P) -> Q) -> SparseKMatrix<Q> {
        SparseKMatrix {
            axes: self.axes,
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(k, e)| (k.clone(), Entry { sign: e.sign, payload: f(&e.payload) }))
                .collect(),
        }
    }

    /// Entries grouped by last coordinate.
    fn rows(&self) -> Vec<Vec<(&[usize], &Entry<P>)>> {
        let mut rows = vec![Vec::new(); self.n];
        for (idx, e) in &self.entries {
            rows[idx[self.axes - 1]].push((&idx[..self.axes - 1], e));
        }
        rows
    }

    /// Calls `f` for every selection of one entry per row whose coordinates
    /// form bijections on every axis. `f` receives the chosen index tuples
    /// in row order and the sign `prod_j sgn(a_j)` of the bijections. When
    /// `cap` is set, selections whose payload degree exceeds it are skipped.
    pub fn for_each_selection(&self, cap: Option<u32>, mut f: impl FnMut(&[&[usize]], Sign)) {
        let rows = self.rows();
        let mut search = Selector::new(self.axes - 1, self.n, cap);
        search.run(&rows, 0, &mut |chosen: &[(&[usize], &Entry<P>)], perms: Sign| {
            let picks: Vec<&[usize]> = chosen.iter().map(|c| c.0).collect();
            f(&picks, perms)
        });
    }
}

struct Selector {
    used: Vec<Vec<bool>>,
    image: Vec<Vec<usize>>,
    degree: u32,
    cap: Option<u32>,
}

impl Selector {
    fn new(k: usize, n: usize, cap: Option<u32>) -> Self {
        Selector { used: vec![vec![false; n]; k], image: vec![vec![0; n]; k], degree: 0, cap }
    }

    fn run<'a, P: Payload>(
        &mut self,
        rows: &[Vec<(&'a [usize], &'a Entry<P>)>],
        row: usize,
        f: &mut dyn FnMut(&[(&'a [usize], &'a Entry<P>)], Sign),
    ) {
        let mut chosen = Vec::with_capacity(rows.len());
        self.descend(rows, row, &mut chosen, f);
    }

    fn descend<'a, P: Payload>(
        &mut self,
        rows: &[Vec<(&'a [usize], &'a Entry<P>)>],
        row: usize,
        chosen: &mut Vec<(&'a [usize], &'a Entry<P>)>,
        f: &mut dyn FnMut(&[(&'a [usize], &'a Entry<P>)], Sign),
    ) {
        if row == rows.len() {
            let sign = self.image.iter().fold(Sign::Plus, |s, img| s * permutation_sign(img));
            f(chosen, sign);
            return;
        }
        for &(coords, entry) in &rows[row] {
            if coords.iter().enumerate().any(|(j, &c)| self.used[j][c]) {
                continue;
            }
            let d = entry.payload.degree();
            if self.cap.is_some_and(|cap| self.degree + d > cap) {
                continue;
            }
            for (j, &c) in coords.iter().enumerate() {
                self.used[j][c] = true;
                self.image[j][row] = c;
            }
            self.degree += d;
            chosen.push((coords, entry));
            self.descend(rows, row + 1, chosen, f);
            chosen.pop();
            self.degree -= d;
            for (j, &c) in coords.iter().enumerate() {
                self.used[j][c] = false;
            }
        }
    }
}

fn sparse_expand<P: Payload>(m: &SparseKMatrix<P>, cap: Option<u32>, signed: bool) -> P::Sum {
    let rows = m.rows();
    if m.n == 0 {
        let mut s = P::empty_sum(cap);
        P::add_to(&mut s, &P::unit(), Sign::Plus);
        return s;
    }
    let k = m.axes - 1;
    let partial: Vec<P::Sum> = rows[0]
        .par_iter()
        .map(|&first| {
            let mut sum = P::empty_sum(cap);
            let mut sel = Selector::new(k, m.n, cap);
            let d = first.1.payload.degree();
            if cap.is_some_and(|c| d > c) {
                return sum;
            }
            for (j, &c) in first.0.iter().enumerate() {
                sel.used[j][c] = true;
                sel.image[j][0] = c;
            }
            sel.degree = d;
            let mut chosen = vec![first];
            sel.descend(&rows, 1, &mut chosen, &mut |picks: &[(&[usize], &Entry<P>)], perms: Sign| {
                let mut payload = P::unit();
                let mut sign = if signed { perms } else { Sign::Plus };
                for (_, e) in picks {
                    payload = payload.times(&e.payload);
                    sign *= e.sign;
                }
                P::add_to(&mut sum, &payload, sign);
            });
            sum
        })
        .collect();
    let mut total = P::empty_sum(cap);
    for s in partial {
        P::merge(&mut total, s);
    }
    total
}

/// Determinant by enumerating row-wise selections of nonzero entries.
/// Entry signs are always applied; `cap` truncates by payload degree.
pub fn hyper_det_sparse<P: Payload>(m: &SparseKMatrix<P>, cap: Option<u32>) -> P::Sum {
    sparse_expand(m, cap, true)
}

/// Permanent by the same enumeration, without bijection signs.
pub fn hyper_per_sparse<P: Payload>(m: &SparseKMatrix<P>, cap: Option<u32>) -> P::Sum {
    sparse_expand(m, cap, false)
}

fn all_permutations(n: usize) -> Vec<(Vec<usize>, Sign)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, Sign)>) {
        if prefix.len() == used.len() {
            out.push((prefix.clone(), permutation_sign(prefix)));
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn naive_expand<P: Payload>(m: &SparseKMatrix<P>, signed: bool) -> Result<P::Sum, AlgError> {
    let k = m.axes - 1;
    let fact: u128 = (1..=m.n as u128).product();
    if m.n > NAIVE_MAX_N || fact.checked_pow(k as u32).is_none_or(|t| t > NAIVE_MAX_TERMS) {
        return Err(AlgError::TooLarge { n: m.n, axes: m.axes });
    }
    let perms = all_permutations(m.n);
    let mut sum = P::empty_sum(None);
    let mut odometer = vec![0usize; k];
    let mut index = vec![0usize; m.axes];
    loop {
        let mut payload = P::unit();
        let mut sign = Sign::Plus;
        let mut nonzero = true;
        for i in 0..m.n {
            for j in 0..k {
                index[j] = perms[odometer[j]].0[i];
            }
            index[k] = i;
            match m.entries.get(&index) {
                Some(e) => {
                    payload = payload.times(&e.payload);
                    sign *= e.sign;
                }
                None => {
                    nonzero = false;
                    break;
                }
            }
        }
        if nonzero {
            if signed {
                for &o in &odometer {
                    sign *= perms[o].1;
                }
            }
            P::add_to(&mut sum, &payload, sign);
        }
        let mut j = 0;
        loop {
            if j == k {
                return Ok(sum);
            }
            odometer[j] += 1;
            if odometer[j] < perms.len() {
                break;
            }
            odometer[j] = 0;
            j += 1;
        }
    }
}

/// Determinant straight from the definition: every tuple of bijections.
pub fn hyper_det_naive<P: Payload>(m: &SparseKMatrix<P>) -> Result<P::Sum, AlgError> {
    naive_expand(m, true)
}

pub fn hyper_per_naive<P: Payload>(m: &SparseKMatrix<P>) -> Result<P::Sum, AlgError> {
    naive_expand(m, false)
}

/// Per-part vertex orders of a k-partite hypergraph, as global vertex ids.
pub type PartOrders = Vec<Vec<usize>>;

/// The input order of every part.
pub fn input_orders(h: &KPartiteHypergraph) -> PartOrders {
    (0..h.k()).map(|p| (0..h.part_size(p)).map(|i| h.global(p, i)).collect()).collect()
}

fn positions(h: &KPartiteHypergraph, orders: &PartOrders) -> Result<Vec<usize>, AlgError> {
    if !h.has_equal_parts() {
        return Err(AlgError::UnequalParts);
    }
    let mut pos = vec![usize::MAX; h.vertex_count()];
    for order in orders {
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
    }
    Ok(pos)
}

fn transition_matrix<P: Payload>(
    h: &KPartiteHypergraph,
    orders: &PartOrders,
    payload: impl Fn(usize) -> P,
) -> Result<SparseKMatrix<P>, AlgError> {
    let pos = positions(h, orders)?;
    let n = h.part_size(0);
    let mut m = SparseKMatrix::new(h.k(), n);
    for (e, edge) in h.edges().iter().enumerate() {
        let idx = edge.verts.iter().map(|&v| pos[v]).collect();
        m.insert(idx, Sign::Plus, payload(e))?;
    }
    Ok(m)
}

/// `T(H, x)`: entry `x_e` at each edge's position tuple; variable id = edge index.
pub fn transition_matrix_x(h: &KPartiteHypergraph, orders: &PartOrders) -> Result<SparseKMatrix<Monomial>, AlgError> {
    transition_matrix(h, orders, |e| Monomial::var(e as VarId))
}

/// `T(H, w, z)`: entry `z^{w(e)}`.
pub fn transition_matrix_z(h: &KPartiteHypergraph, orders: &PartOrders) -> Result<SparseKMatrix<ZPower>, AlgError> {
    transition_matrix(h, orders, |e| ZPower(h.edge(e).weight.clone()))
}

/// `A(D, x)` with hyperedge signs; variable id = hyperedge index.
pub fn adjacency_matrix_x(d: &DirectedHypergraph) -> SparseKMatrix<Monomial> {
    let mut m = SparseKMatrix::new(d.arity(), d.vertex_count());
    for (i, h) in d.hyperedges().iter().enumerate() {
        m.insert(h.verts.clone(), h.sign, Monomial::var(i as VarId)).expect("validated hyperedge");
    }
    m
}

/// `A(D, w, z)` with hyperedge signs.
pub fn adjacency_matrix_z(d: &DirectedHypergraph) -> SparseKMatrix<ZPower> {
    let mut m = SparseKMatrix::new(d.arity(), d.vertex_count());
    for h in d.hyperedges() {
        m.insert(h.verts.clone(), h.sign, ZPower(h.weight.clone())).expect("validated hyperedge");
    }
    m
}

/// `det(I - A(D, x))` truncated at total degree `d`.
pub fn det_identity_minus(d: &DirectedHypergraph, cap: u32) -> TruncatedPolynomial {
    let m = adjacency_matrix_x(d).negated().plus_identity();
    hyper_det_sparse(&m, Some(cap))
}

/// The constant `1` as a weight series, for comparisons.
pub fn unit_series() -> WeightSeries {
    WeightSeries::monomial(BigRational::zero(), BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::fixtures::fixture_b;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn var(i: u32) -> TruncatedPolynomial {
        TruncatedPolynomial::var(i)
    }

    fn matrix2(entries: &[(usize, usize, u32)]) -> SparseKMatrix<Monomial> {
        let mut m = SparseKMatrix::new(2, 2);
        for &(r, c, v) in entries {
            // index = (column, row)
            m.insert(vec![c, r], Sign::Plus, Monomial::var(v)).unwrap();
        }
        m
    }

    #[test]
    fn two_by_two() {
        let m = matrix2(&[(0, 0, 0), (0, 1, 1), (1, 0, 2), (1, 1, 3)]);
        let ad_bc = &(&var(0) * &var(3)) - &(&var(1) * &var(2));
        let ad_plus_bc = &(&var(0) * &var(3)) + &(&var(1) * &var(2));
        assert_eq!(hyper_det_naive(&m).unwrap(), ad_bc);
        assert_eq!(hyper_det_sparse(&m, None), ad_bc);
        assert_eq!(hyper_per_naive(&m).unwrap(), ad_plus_bc);
        assert_eq!(hyper_per_sparse(&m, None), ad_plus_bc);
    }

    #[test]
    fn diagonal_four_matrix() {
        let mut m = SparseKMatrix::new(4, 3);
        for i in 0..3 {
            m.insert(vec![i; 4], Sign::Plus, Monomial::var(i as u32)).unwrap();
        }
        let prod = TruncatedPolynomial::term(BigInt::one(), Monomial::product_of([0, 1, 2]));
        assert_eq!(hyper_det_naive(&m).unwrap(), prod);
        assert_eq!(hyper_per_naive(&m).unwrap(), prod);
        assert_eq!(hyper_det_sparse(&m, None), prod);
    }

    /// Hand expansion of a 2x2x2 matrix over its four bijection pairs.
    #[test]
    fn three_index_two_by_two() {
        let mut m = SparseKMatrix::new(3, 2);
        let mut next = 0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    m.insert(vec![a, b, c], Sign::Plus, Monomial::var(next)).unwrap();
                    next += 1;
                }
            }
        }
        let x = |a: usize, b: usize, c: usize| var((a * 4 + b * 2 + c) as u32);
        // (a1, a2) each identity or swap; sign is the product.
        let id_id = &x(0, 0, 0) * &x(1, 1, 1);
        let sw_id = &x(1, 0, 0) * &x(0, 1, 1);
        let id_sw = &x(0, 1, 0) * &x(1, 0, 1);
        let sw_sw = &x(1, 1, 0) * &x(0, 0, 1);
        let det = &(&(&id_id - &sw_id) - &id_sw) + &sw_sw;
        let per = &(&(&id_id + &sw_id) + &id_sw) + &sw_sw;
        assert_eq!(hyper_det_naive(&m).unwrap(), det);
        assert_eq!(hyper_per_naive(&m).unwrap(), per);
        assert_eq!(hyper_det_sparse(&m, None), det);
    }

    fn random_matrix(rng: &mut ChaCha8Rng, axes: usize, n: usize, density: f64) -> SparseKMatrix<Monomial> {
        let mut m = SparseKMatrix::new(axes, n);
        let total = n.pow(axes as u32);
        let mut var = 0;
        for flat in 0..total {
            if rng.gen_bool(density) {
                let mut idx = Vec::with_capacity(axes);
                let mut r = flat;
                for _ in 0..axes {
                    idx.push(r % n);
                    r /= n;
                }
                let sign = Sign::from_parity(rng.gen_bool(0.5));
                m.insert(idx, sign, Monomial::var(var)).unwrap();
                var += 1;
            }
        }
        m
    }

    #[test]
    fn sparse_matches_naive_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut cases = 0;
        for axes in 2..=4 {
            for n in 1..=3 {
                for _ in 0..8 {
                    let density = rng.gen_range(0.2..=0.5);
                    let m = random_matrix(&mut rng, axes, n, density);
                    assert_eq!(hyper_det_sparse(&m, None), hyper_det_naive(&m).unwrap());
                    assert_eq!(hyper_per_sparse(&m, None), hyper_per_naive(&m).unwrap());
                    cases += 1;
                }
            }
        }
        assert!(cases >= 50);
    }

    #[test]
    fn flipping_a_hyper_row_negates_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 3, 3, 0.5);
            let row = rng.gen_range(0..3);
            let flipped = m.flip_hyper_row(row);
            assert_eq!(hyper_det_naive(&flipped).unwrap(), hyper_det_naive(&m).unwrap().neg());
            assert_eq!(flipped.flip_hyper_row(row), m);
        }
    }

    #[test]
    fn flipping_negates_matching_terms_in_per() {
        let m = matrix2(&[(0, 0, 0), (1, 1, 1), (0, 1, 2)]);
        // per = x0*x1; the term uses row 1 once.
        let flipped = m.flip_hyper_row(1);
        assert_eq!(hyper_per_sparse(&flipped, None), hyper_per_sparse(&m, None).neg());
    }

    #[test]
    fn large_identity_is_instant() {
        let m: SparseKMatrix<Monomial> = SparseKMatrix::identity(4, 13);
        assert_eq!(hyper_det_sparse(&m, None), TruncatedPolynomial::one());
        assert!(matches!(hyper_det_naive(&m), Err(AlgError::TooLarge { .. })));
    }

    #[test]
    fn empty_matrix_has_unit_det() {
        let m: SparseKMatrix<ZPower> = SparseKMatrix::new(3, 0);
        assert_eq!(hyper_det_sparse(&m, None), unit_series());
        assert_eq!(hyper_det_naive(&m).unwrap(), unit_series());
    }

    #[test]
    fn permanent_of_fixture_b_is_matching_polynomial() {
        let (h, _) = fixture_b();
        let t = transition_matrix_x(&h, &input_orders(&h)).unwrap();
        let expected = &TruncatedPolynomial::term(BigInt::one(), Monomial::product_of([0, 1, 2]))
            + &TruncatedPolynomial::term(BigInt::one(), Monomial::product_of([3, 4, 5]));
        assert_eq!(hyper_per_sparse(&t, None), expected);
        assert_eq!(hyper_per_naive(&t).unwrap(), expected);
        let tz = transition_matrix_z(&h, &input_orders(&h)).unwrap();
        assert_eq!(hyper_per_sparse(&tz, None), h.matching_enumerator());
    }

    #[test]
    fn truncation_drops_high_degree_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 3, 3, 0.5).plus_identity_if_free();
            let full = hyper_det_sparse(&m, None);
            for cap in 0..4 {
                assert_eq!(hyper_det_sparse(&m, Some(cap)), full.truncate(cap));
            }
        }
    }

    impl SparseKMatrix<Monomial> {
        fn plus_identity_if_free(&self) -> Self {
            let mut m = self.clone();
            for i in 0..self.n {
                m.entries
                    .entry(vec![i; self.axes])
                    .or_insert(Entry { sign: Sign::Plus, payload: Monomial::one() });
            }
            m
        }
    }
}
