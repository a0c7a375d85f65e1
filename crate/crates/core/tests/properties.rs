use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use hyperzeta::circulations::{coin_lemma_check, is2_truncated, is4_truncated, Digraph, EnumerationLimits};
use hyperzeta::codes::{even_set_enumerator, weight_enumerator, Graph};
use hyperzeta::hyperalg::{det_identity_minus, hyper_det_naive, hyper_det_sparse, hyper_per_naive, hyper_per_sparse, SparseKMatrix};
use hyperzeta::hypergraph::DirectedHypergraph;
use hyperzeta::poly::{product_trunc, Monomial, TruncatedPolynomial};
use hyperzeta::sign::permutation_sign;
use hyperzeta::Sign;

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((0u32..4, 0u32..3), 0..3).prop_map(Monomial::from_pairs)
}

fn poly() -> impl Strategy<Value = TruncatedPolynomial> {
    prop::collection::vec((monomial(), -3i64..=3), 0..5)
        .prop_map(|terms| TruncatedPolynomial::from_terms(terms.into_iter().map(|(m, c)| (m, BigInt::from(c)))))
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// A sparse matrix with distinct variables, so cancellations are visible.
fn sparse_matrix() -> impl Strategy<Value = SparseKMatrix<Monomial>> {
    (2usize..=4, 1usize..=3).prop_flat_map(|(axes, n)| {
        let cells = n.pow(axes as u32);
        prop::collection::vec(prop::option::of(any::<bool>()), cells).prop_map(move |cells| {
            let mut m = SparseKMatrix::new(axes, n);
            for (flat, cell) in cells.into_iter().enumerate() {
                if let Some(minus) = cell {
                    let idx = (0..axes).map(|a| flat / n.pow(a as u32) % n).collect();
                    m.insert(idx, Sign::from_parity(minus), Monomial::var(flat as u32)).unwrap();
                }
            }
            m
        })
    })
}

fn digraph(n: usize) -> impl Strategy<Value = Digraph> {
    let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    prop::sample::subsequence(all.clone(), 0..=all.len()).prop_map(move |arcs| Digraph::new(n, arcs).unwrap())
}

/// A few hyperedges of arity 4 on 4 vertices, as vertex permutations.
fn four_hypergraph() -> impl Strategy<Value = DirectedHypergraph> {
    prop::collection::btree_set(permutation(4), 1..=7).prop_flat_map(|edges| {
        let k = edges.len();
        (Just(edges), prop::collection::vec(any::<bool>(), k)).prop_map(|(edges, minus)| {
            let mut d = DirectedHypergraph::with_vertices(4, 4);
            for (e, m) in edges.into_iter().zip(minus) {
                d.push(e, BigRational::from_integer(1.into()), Sign::from_parity(m)).unwrap();
            }
            d
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&TruncatedPolynomial::one()), a.clone());
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn truncation_commutes_with_products(a in poly(), b in poly(), d in 0u32..6) {
        let full = a.mul(&b).truncate(d);
        prop_assert_eq!(&a.truncate(d).mul(&b.truncate(d)), &full);
        prop_assert_eq!(&a.mul_trunc(&b, d), &full);
        prop_assert_eq!(a.add(&b).truncate(d), a.truncate(d).add(&b.truncate(d)));
    }

    #[test]
    fn formal_product_ignores_factor_order(
        factors in prop::collection::vec((prop::bool::ANY, monomial().prop_filter("degree >= 1", |m| m.degree() > 0)), 0..6),
        d in 0u32..7,
        seed in any::<u64>(),
    ) {
        let factors: Vec<(i8, Monomial)> = factors.into_iter().map(|(neg, m)| (if neg { -1 } else { 1 }, m)).collect();
        let p = product_trunc(&factors, d).unwrap();
        let mut shuffled = factors.clone();
        shuffled.sort_by_key(|(s, m)| (m.degree().wrapping_mul(seed as u32 | 1), *s));
        shuffled.reverse();
        prop_assert_eq!(&product_trunc(&shuffled, d).unwrap(), &p);
        // against plain multiplication of the binomials
        let direct = factors.iter().fold(TruncatedPolynomial::one(), |acc, (s, m)| {
            let f = TruncatedPolynomial::from_terms([(Monomial::one(), BigInt::from(1)), (m.clone(), BigInt::from(*s))]);
            acc.mul(&f)
        });
        prop_assert_eq!(direct.truncate(d), p);
    }

    #[test]
    fn permutation_sign_is_multiplicative(p in permutation(6), q in permutation(6)) {
        let pq: Vec<usize> = q.iter().map(|&i| p[i]).collect();
        prop_assert_eq!(permutation_sign(&pq), permutation_sign(&p) * permutation_sign(&q));
    }

    #[test]
    fn sparse_expansion_matches_naive(m in sparse_matrix()) {
        prop_assert_eq!(hyper_det_sparse(&m, None), hyper_det_naive(&m).unwrap());
        prop_assert_eq!(hyper_per_sparse(&m, None), hyper_per_naive(&m).unwrap());
    }

    #[test]
    fn even_sets_are_the_cycle_space(
        edges in prop::sample::subsequence((0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect::<Vec<_>>(), 0..=7),
        w in prop::collection::vec(-2i64..=3, 7),
    ) {
        let g = Graph::new((0..5).map(|v| v.to_string()).collect(), edges).unwrap();
        let weights: Vec<BigRational> = w[..g.edges().len()].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let code = g.cycle_space(weights.clone()).unwrap();
        prop_assert_eq!(even_set_enumerator(&g, &weights).unwrap(), weight_enumerator(&code).unwrap());
    }

    #[test]
    fn two_dimensional_product_is_the_determinant(d in digraph(4), cap in 1u32..=5) {
        prop_assert_eq!(is2_truncated(&d, cap), det_identity_minus(&d.to_hypergraph(), cap));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn four_dimensional_product_is_the_determinant(d in four_hypergraph(), cap in 4u32..=8) {
        let product = is4_truncated(&d, cap, EnumerationLimits::default()).unwrap();
        prop_assert_eq!(product, det_identity_minus(&d, cap));
    }

    #[test]
    fn coin_sums_vanish(profile in prop::collection::vec(1u32..=3, 1..=4)) {
        let n: u32 = profile.iter().sum();
        prop_assume!((2..=7).contains(&n));
        prop_assert_eq!(coin_lemma_check(&profile), 0);
    }
}
