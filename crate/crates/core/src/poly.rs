//! Exact polynomial arithmetic.
//!
//! [`TruncatedPolynomial`] is a sparse multivariate polynomial over the
//! integers with an optional cap on total degree; it houses every formal
//! product the crate expands. [`WeightSeries`] is a finite sum of rational
//! powers of a single variable `z`, used for weight enumerators and for
//! permanents/determinants of weighted transition matrices.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Opaque variable identifier; rendered as `x{id}`.
pub type VarId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("factor {index} of a formal product has a degree-0 monomial")]
    ConstantFactor { index: usize },
}

/// A monomial `x_{i1}^{e1} * ... * x_{ik}^{ek}` stored as `(var, exp)` pairs
/// sorted by variable, with every exponent positive.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds a monomial from arbitrary `(var, exp)` pairs; repeated
    /// variables are merged and zero exponents dropped.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    /// Product of the given variables, with repetition.
    pub fn product_of<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        Self::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

/// Graded order: total degree first, then the dense exponent vectors
/// compared lexicographically by ascending variable id. Sorting ascending
/// renders `1 - 2*x3*x7 + x1^2`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (&self.0, &other.0);
            for (x, y) in a.iter().zip(b.iter()) {
                if x.0 != y.0 {
                    // the side holding the smaller variable has a positive
                    // exponent where the other has zero
                    return if x.0 < y.0 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
                if x.1 != y.1 {
                    return x.1.cmp(&y.1);
                }
            }
            a.len().cmp(&b.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, &(v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "x{v}")?;
            } else {
                write!(f, "x{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse integer polynomial with an optional total-degree cap.
///
/// Terms above the cap are never stored and zero coefficients are removed
/// eagerly, so two equal polynomials have identical term maps.
#[derive(Clone, Debug, Default)]
pub struct TruncatedPolynomial {
    terms: BTreeMap<Monomial, BigInt>,
    cap: Option<u32>,
}

impl PartialEq for TruncatedPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for TruncatedPolynomial {}

fn stricter(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl TruncatedPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(BigInt::one(), Monomial::one())
    }

    pub fn term(coeff: BigInt, mono: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(mono, coeff);
        p
    }

    pub fn var(v: VarId) -> Self {
        Self::term(BigInt::one(), Monomial::var(v))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.set_cap(Some(cap));
        self
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    /// Sets the cap and drops every term above it.
    pub fn set_cap(&mut self, cap: Option<u32>) {
        self.cap = cap;
        if let Some(d) = cap {
            self.terms.retain(|m, _| m.degree() <= d);
        }
    }

    /// Copy with all terms of total degree `> d` removed and cap `d`.
    pub fn truncate(&self, d: u32) -> Self {
        let mut p = self.clone();
        p.set_cap(Some(stricter(self.cap, Some(d)).unwrap()));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: BigInt) {
        if coeff.is_zero() || self.cap.is_some_and(|d| mono.degree() > d) {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Coefficient-wise sum; the result keeps the stricter cap.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.set_cap(stricter(self.cap, other.cap));
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        TruncatedPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            cap: self.cap,
        }
    }

    fn mul_with_cap(&self, other: &Self, cap: Option<u32>) -> Self {
        let mut out = TruncatedPolynomial {
            terms: BTreeMap::new(),
            cap,
        };
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                if cap.is_some_and(|d| da + mb.degree() > d) {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Full product (up to the stricter of the operand caps).
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with_cap(other, stricter(self.cap, other.cap))
    }

    /// Product with every term of total degree `> d` discarded.
    pub fn mul_trunc(&self, other: &Self, d: u32) -> Self {
        self.mul_with_cap(other, stricter(stricter(self.cap, other.cap), Some(d)))
    }

    /// Multiplies in place by `1 + sign * m`, keeping terms of degree `<= d`.
    fn mul_binomial_in_place(&mut self, negative: bool, m: &Monomial, d: u32) {
        let dm = m.degree();
        let shifted: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .filter(|(k, _)| k.degree() + dm <= d)
            .map(|(k, c)| (k.mul(m), if negative { -c } else { c.clone() }))
            .collect();
        for (k, c) in shifted {
            self.add_term(k, c);
        }
    }

    /// The least monomial whose coefficients differ, with both coefficients.
    pub fn first_difference(&self, other: &Self) -> Option<(Monomial, BigInt, BigInt)> {
        let keys: std::collections::BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().find_map(|m| {
            let (a, b) = (self.coeff(m), other.coeff(m));
            (a != b).then(|| (m.clone(), a, b))
        })
    }

    /// Substitutes `x_v -> sign(v) * x_v` for the variables listed.
    pub fn with_signed_vars(&self, negate: impl Fn(VarId) -> bool) -> Self {
        let terms = self.terms.iter().map(|(m, c)| {
            let odd = m
                .pairs()
                .iter()
                .filter(|&&(v, e)| negate(v) && e % 2 == 1)
                .count()
                % 2
                == 1;
            (m.clone(), if odd { -c } else { c.clone() })
        });
        let mut p = Self::from_terms(terms);
        p.cap = self.cap;
        p
    }

    /// Substitutes `x_v -> z^{w(v)}` and collects a [`WeightSeries`].
    pub fn substitute_z(&self, weight: impl Fn(VarId) -> BigRational) -> WeightSeries {
        let mut out = WeightSeries::zero();
        for (m, c) in &self.terms {
            let mut e = BigRational::zero();
            for &(v, k) in m.pairs() {
                e += weight(v) * BigRational::from_integer(BigInt::from(k));
            }
            out.add_term(e, c.clone());
        }
        out
    }
}

/// Expands `prod_i (1 + sign_i * m_i)` keeping terms of total degree `<= d`.
///
/// Every factor must have positive degree, otherwise truncation would not
/// commute with the (possibly infinite) formal product.
pub fn product_trunc(factors: &[(i8, Monomial)], d: u32) -> Result<TruncatedPolynomial, PolyError> {
    if let Some(index) = factors.iter().position(|(_, m)| m.degree() == 0) {
        return Err(PolyError::ConstantFactor { index });
    }
    let mut acc = TruncatedPolynomial::one().with_cap(d);
    for (s, m) in factors {
        if m.degree() <= d {
            acc.mul_binomial_in_place(*s < 0, m, d);
        }
    }
    Ok(acc)
}

fn fmt_signed_terms<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (String, &'a BigInt)>,
{
    let mut first = true;
    for (body, c) in terms {
        let neg = c.is_negative();
        let abs = c.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        if body == "1" {
            write!(f, "{abs}")?;
        } else if abs.is_one() {
            f.write_str(&body)?;
        } else {
            write!(f, "{abs}*{body}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for TruncatedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_signed_terms(f, self.terms.iter().map(|(m, c)| (m.to_string(), c)))
    }
}

impl Add for &TruncatedPolynomial {
    type Output = TruncatedPolynomial;
    fn add(self, rhs: Self) -> TruncatedPolynomial {
        TruncatedPolynomial::add(self, rhs)
    }
}

impl Sub for &TruncatedPolynomial {
    type Output = TruncatedPolynomial;
    fn sub(self, rhs: Self) -> TruncatedPolynomial {
        TruncatedPolynomial::add(self, &rhs.neg())
    }
}

impl Mul for &TruncatedPolynomial {
    type Output = TruncatedPolynomial;
    fn mul(self, rhs: Self) -> TruncatedPolynomial {
        TruncatedPolynomial::mul(self, rhs)
    }
}

impl Neg for &TruncatedPolynomial {
    type Output = TruncatedPolynomial;
    fn neg(self) -> TruncatedPolynomial {
        TruncatedPolynomial::neg(self)
    }
}

/// `sum_q c_q z^q` over finitely many rational exponents `q`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightSeries {
    terms: BTreeMap<BigRational, BigInt>,
}

impl WeightSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::zero(), BigInt::one())
    }

    pub fn monomial(exp: BigRational, coeff: BigInt) -> Self {
        let mut s = Self::zero();
        s.add_term(exp, coeff);
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs with integer exponents.
    pub fn from_int_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let mut s = Self::zero();
        for (e, c) in terms {
            s.add_term(BigRational::from_integer(e.into()), c.into());
        }
        s
    }

    pub fn add_term(&mut self, exp: BigRational, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &BigRational) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &BigInt)> {
        self.terms.iter()
    }

    /// The least exponent whose coefficients differ, with both coefficients.
    pub fn first_difference(&self, other: &Self) -> Option<(BigRational, BigInt, BigInt)> {
        let keys: std::collections::BTreeSet<&BigRational> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().find_map(|e| {
            let (a, b) = (self.coeff(e), other.coeff(e));
            (a != b).then(|| (e.clone(), a, b))
        })
    }

    /// Sum of all coefficients (the value at `z = 1`).
    pub fn total(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        WeightSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

fn fmt_exponent(e: &BigRational) -> String {
    if e.is_integer() {
        if e.is_one() {
            "z".to_string()
        } else {
            format!("z^{}", e.numer())
        }
    } else {
        format!("z^({}/{})", e.numer(), e.denom())
    }
}

impl fmt::Display for WeightSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_signed_terms(
            f,
            self.terms.iter().map(|(e, c)| {
                let body = if e.is_zero() { "1".to_string() } else { fmt_exponent(e) };
                (body, c)
            }),
        )
    }
}

/// Parses a rational from `"3"`, `"-3/2"` or `"0.5"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, d));
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Canonical text of a rational: `3`, `-3/2`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: VarId) -> TruncatedPolynomial {
        TruncatedPolynomial::var(v)
    }

    fn c(n: i64) -> TruncatedPolynomial {
        TruncatedPolynomial::term(n.into(), Monomial::one())
    }

    #[test]
    fn add_cancels_and_collects() {
        let p = &c(1) + &x(0);
        let q = &c(1) - &x(0);
        assert_eq!(&p + &q, c(2));
        assert_eq!(&TruncatedPolynomial::zero() + &p, p);
        let sq = &x(0) * &x(0);
        assert_eq!((&sq + &sq).to_string(), "2*x0^2");
    }

    #[test]
    fn add_keeps_stricter_cap() {
        let p = (&c(1) + &(&x(0) * &x(0))).with_cap(2);
        let q = x(1).with_cap(1);
        let s = p.add(&q);
        assert_eq!(s.cap(), Some(1));
        assert_eq!(s.to_string(), "1 + x1");
    }

    #[test]
    fn mul_trunc_drops_high_terms() {
        let p = &c(1) + &x(0);
        assert_eq!(p.mul_trunc(&p, 1).to_string(), "1 + 2*x0");
        assert_eq!(x(0).mul_trunc(&x(1), 2).to_string(), "x0*x1");
        assert!(x(0).mul_trunc(&x(1), 1).is_zero());
    }

    #[test]
    fn graded_order_rendering() {
        let p = TruncatedPolynomial::from_terms([
            (Monomial::from_pairs([(1, 2)]), BigInt::from(1)),
            (Monomial::product_of([3, 7]), BigInt::from(-2)),
            (Monomial::one(), BigInt::from(1)),
        ]);
        assert_eq!(p.to_string(), "1 - 2*x3*x7 + x1^2");
        assert_eq!(TruncatedPolynomial::zero().to_string(), "0");
        assert_eq!((-&x(4)).to_string(), "-x4");
    }

    #[test]
    fn product_trunc_small_cases() {
        let xy = Monomial::product_of([0, 1]);
        assert_eq!(product_trunc(&[(-1, xy)], 2).unwrap().to_string(), "1 - x0*x1");
        let xm = Monomial::var(0);
        let p = product_trunc(&[(-1, xm.clone()), (-1, xm)], 2).unwrap();
        assert_eq!(p.to_string(), "1 - 2*x0 + x0^2");
        assert_eq!(
            product_trunc(&[(1, Monomial::var(2)), (1, Monomial::one())], 3),
            Err(PolyError::ConstantFactor { index: 1 })
        );
    }

    #[test]
    fn product_trunc_skips_factors_above_cap() {
        let big = Monomial::product_of([0, 1, 2]);
        assert_eq!(product_trunc(&[(-1, big)], 2).unwrap(), TruncatedPolynomial::one());
    }

    #[test]
    fn signed_substitution() {
        let p = &(&c(1) + &x(0)) * &(&c(1) + &x(1));
        let q = p.with_signed_vars(|v| v == 1);
        assert_eq!(q.to_string(), "1 - x1 + x0 - x0*x1");
    }

    #[test]
    fn weight_series_rendering() {
        let half = BigRational::new(3.into(), 2.into());
        let mut s = WeightSeries::one();
        s.add_term(half, BigInt::one());
        assert_eq!(s.to_string(), "1 + z^(3/2)");
        assert_eq!(WeightSeries::from_int_terms([(0, 1), (3, 1)]).to_string(), "1 + z^3");
        assert_eq!(WeightSeries::from_int_terms([(1, -2), (2, 1)]).to_string(), "-2*z + z^2");
        assert_eq!(WeightSeries::zero().to_string(), "0");
        let p = WeightSeries::from_int_terms([(0, 1), (1, 1)]);
        assert_eq!(p.mul(&p).to_string(), "1 + 2*z + z^2");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6"), Some(BigRational::new(1.into(), 2.into())));
        assert_eq!(parse_rational("-0.25"), Some(BigRational::new((-1).into(), 4.into())));
        assert_eq!(parse_rational("7"), Some(BigRational::from_integer(7.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(format_rational(&BigRational::new(6.into(), (-4).into())), "-3/2");
    }

    #[test]
    fn first_difference_finds_least_term() {
        let a = &(&TruncatedPolynomial::one() + &x(1)) + &x(0);
        let b = &TruncatedPolynomial::one() + &x(1);
        assert_eq!(a.first_difference(&b), Some((Monomial::var(0), BigInt::one(), BigInt::zero())));
        assert_eq!(a.first_difference(&a), None);
        let w = WeightSeries::from_int_terms([(0, 1), (2, 1)]);
        let v = WeightSeries::from_int_terms([(0, 1), (2, -1)]);
        assert_eq!(w.first_difference(&v).map(|t| t.0), Some(BigRational::from_integer(2.into())));
    }
}
