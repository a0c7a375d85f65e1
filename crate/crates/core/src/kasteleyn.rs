//! Kasteleyn signings of hypermatrices through their bipartite support graphs.
//!
//! For each non-row axis `i` the support graph joins row index `r` (left) to
//! axis-`i` index `c` (right) whenever some nonzero entry has last
//! coordinate `r` and `i`-th coordinate `c`. Signing every support graph so
//! that its permanent equals its signed determinant makes the whole
//! hypermatrix satisfy `per(A) = det(A')`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::hyperalg::{hyper_det_sparse, hyper_per_sparse, Payload, SparseKMatrix};
use crate::poly::{Monomial, VarId};
use crate::sign::{permutation_sign, Sign};

pub const BRUTEFORCE_MAX_EDGES: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KasteleynError {
    #[error("vertex {vertex} of the support graph for axis {axis} has degree {degree} > 2")]
    DegreeTooHigh { axis: usize, vertex: String, degree: usize },
    #[error("not Kasteleyn-signable at this size")]
    NotSignable,
    #[error("support graph has {0} edges; brute force is limited to {BRUTEFORCE_MAX_EDGES}")]
    TooManyEdges(usize),
    #[error("no sign for support edge ({0}, {1})")]
    MissingEdge(usize, usize),
    #[error("expected {expected} signings, got {got}")]
    SigningCount { expected: usize, got: usize },
}

/// Bipartite support graph between the row axis (left) and one other axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportBipartite {
    pub axis: usize,
    pub n: usize,
    /// `(left, right)` pairs, sorted and distinct.
    pub edges: Vec<(usize, usize)>,
}

impl SupportBipartite {
    pub fn new(axis: usize, n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        SupportBipartite { axis, n, edges: set.into_iter().collect() }
    }

    fn edge_index(&self, l: usize, r: usize) -> Option<usize> {
        self.edges.binary_search(&(l, r)).ok()
    }

    /// Adjacency lists over `0..2n`, left vertices first.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); 2 * self.n];
        for (e, &(l, r)) in self.edges.iter().enumerate() {
            adj[l].push(e);
            adj[self.n + r].push(e);
        }
        adj
    }

    fn max_degree(&self) -> Option<(usize, usize)> {
        self.adjacency()
            .iter()
            .enumerate()
            .map(|(v, a)| (v, a.len()))
            .max_by_key(|&(v, d)| (d, std::cmp::Reverse(v)))
    }

    fn vertex_label(&self, v: usize) -> String {
        if v < self.n {
            format!("row {v}")
        } else {
            format!("col {}", v - self.n)
        }
    }

    /// The bipartite matrix with variable `x_e` at each edge, signed by `s`.
    /// Rows are left vertices.
    pub fn matrix(&self, signing: &EdgeSigning) -> SparseKMatrix<Monomial> {
        let mut m = SparseKMatrix::new(2, self.n);
        for (e, &(l, r)) in self.edges.iter().enumerate() {
            m.insert(vec![r, l], signing.signs[e], Monomial::var(e as VarId)).expect("in range");
        }
        m
    }

    /// `per(M) = det(M')`, both by full matching enumeration.
    ///
    /// Each connected component is expanded on its own, with rows in
    /// traversal order so that a wrong choice on a long path dies at the
    /// next row. Both sides are products over the components, which use
    /// disjoint variables, so the products agree iff every component has
    /// `det_i = s_i per_i` and the `s_i` times the sign of the block
    /// relabeling is `+1`. Expanding the products would cost `2^cycles`.
    pub fn verify_by_enumeration(&self, signing: &EdgeSigning) -> bool {
        let comps = self.traversal_components();
        if comps.iter().any(|(rows, cols)| rows.len() != cols.len()) {
            // no perfect matching: both sides vanish
            return true;
        }
        let plus = EdgeSigning::all_plus(self.edges.len());
        let mut blocks = Vec::with_capacity(comps.len());
        for (rows, cols) in &comps {
            let (mut row_of, mut col_of) = (vec![usize::MAX; self.n], vec![usize::MAX; self.n]);
            rows.iter().enumerate().for_each(|(i, &r)| row_of[r] = i);
            cols.iter().enumerate().for_each(|(i, &c)| col_of[c] = i);
            let block = |s: &EdgeSigning| {
                let mut m = SparseKMatrix::new(2, rows.len());
                for (e, &(l, r)) in self.edges.iter().enumerate() {
                    if row_of[l] != usize::MAX {
                        m.insert(vec![col_of[r], row_of[l]], s.signs[e], Monomial::var(e as VarId)).expect("in range");
                    }
                }
                m
            };
            let per = hyper_per_sparse(&block(&plus), None);
            if per.is_zero() {
                // same support, so the determinant vanishes as well
                return true;
            }
            blocks.push((per, block(signing)));
        }
        let mut sign = Sign::Plus;
        for (per, signed) in &blocks {
            let det = hyper_det_sparse(signed, None);
            if det == per.neg() {
                sign = -sign;
            } else if &det != per {
                return false;
            }
        }
        let rows: Vec<usize> = comps.iter().flat_map(|c| c.0.iter().copied()).collect();
        let cols: Vec<usize> = comps.iter().flat_map(|c| c.1.iter().copied()).collect();
        sign * permutation_sign(&rows) * permutation_sign(&cols) == Sign::Plus
    }

    /// Components as (left vertices, right vertices), each in depth-first
    /// order from a vertex of least degree.
    fn traversal_components(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let adj = self.adjacency();
        let ends = |e: usize| [self.edges[e].0, self.n + self.edges[e].1];
        let mut seen = vec![false; 2 * self.n];
        let mut out = Vec::new();
        for s in 0..2 * self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                for &e in &adj[comp[i]] {
                    for w in ends(e) {
                        if !seen[w] {
                            seen[w] = true;
                            comp.push(w);
                        }
                    }
                }
                i += 1;
            }
            let start = *comp.iter().min_by_key(|&&v| (adj[v].len(), v)).expect("nonempty");
            let mut visited = std::collections::HashSet::new();
            let mut stack = vec![start];
            let (mut rows, mut cols) = (Vec::new(), Vec::new());
            while let Some(v) = stack.pop() {
                if !visited.insert(v) {
                    continue;
                }
                if v < self.n {
                    rows.push(v);
                } else {
                    cols.push(v - self.n);
                }
                for &e in adj[v].iter().rev() {
                    for w in ends(e) {
                        if !visited.contains(&w) {
                            stack.push(w);
                        }
                    }
                }
            }
            out.push((rows, cols));
        }
        out
    }
}

/// One sign per support edge, aligned with `SupportBipartite::edges`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSigning {
    pub signs: Vec<Sign>,
}

impl EdgeSigning {
    pub fn all_plus(m: usize) -> Self {
        EdgeSigning { signs: vec![Sign::Plus; m] }
    }

    pub fn minus_count(&self) -> usize {
        self.signs.iter().filter(|s| s.is_minus()).count()
    }
}

/// The support graphs `G_1..G_k` of a matrix with `k + 1` axes.
pub fn support_graphs<P: Payload>(a: &SparseKMatrix<P>) -> Vec<SupportBipartite> {
    let k = a.axes() - 1;
    (0..k)
        .map(|i| SupportBipartite::new(i, a.n(), a.entries().map(|(idx, _)| (idx[k], idx[i]))))
        .collect()
}

#[derive(Debug)]
enum Component {
    /// Edges in traversal order.
    Path(Vec<usize>),
    Cycle(Vec<usize>),
}

fn components(g: &SupportBipartite) -> Vec<Component> {
    let adj = g.adjacency();
    let other = |e: usize, v: usize| {
        let (l, r) = g.edges[e];
        if v == l {
            g.n + r
        } else {
            l
        }
    };
    let mut seen_edge = vec![false; g.edges.len()];
    let mut out = Vec::new();
    // Paths first, walked from an endpoint.
    for start in 0..adj.len() {
        if adj[start].len() != 1 || seen_edge[adj[start][0]] {
            continue;
        }
        let mut walk = Vec::new();
        let mut v = start;
        let mut e = adj[start][0];
        loop {
            seen_edge[e] = true;
            walk.push(e);
            v = other(e, v);
            match adj[v].iter().find(|&&f| !seen_edge[f]) {
                Some(&f) => e = f,
                None => break,
            }
        }
        out.push(Component::Path(walk));
    }
    for start in 0..g.edges.len() {
        if seen_edge[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut v = g.edges[start].0;
        let mut e = start;
        loop {
            seen_edge[e] = true;
            walk.push(e);
            v = other(e, v);
            match adj[v].iter().find(|&&f| !seen_edge[f]) {
                Some(&f) => e = f,
                None => break,
            }
        }
        out.push(Component::Cycle(walk));
    }
    out
}

/// Signed term of a perfect matching given as a set of edge indices.
fn matching_term_sign(g: &SupportBipartite, matching: &[usize], signing: &EdgeSigning) -> Sign {
    let mut perm = vec![0; g.n];
    let mut sign = Sign::Plus;
    for &e in matching {
        let (l, r) = g.edges[e];
        perm[l] = r;
        sign *= signing.signs[e];
    }
    sign * permutation_sign(&perm)
}

/// Base matching and, per cycle, its two alternatives.
struct Structure {
    base: Vec<usize>,
    cycles: Vec<[Vec<usize>; 2]>,
}

fn structure(g: &SupportBipartite) -> Option<Structure> {
    let mut base = Vec::new();
    let mut cycles = Vec::new();
    let mut covered = 0;
    for c in components(g) {
        match c {
            Component::Path(edges) => {
                // A path has a perfect matching iff it has an odd number of edges.
                if edges.len() % 2 == 0 {
                    return None;
                }
                base.extend(edges.iter().step_by(2));
                covered += edges.len() + 1;
            }
            Component::Cycle(edges) => {
                let even: Vec<usize> = edges.iter().step_by(2).copied().collect();
                let odd: Vec<usize> = edges.iter().skip(1).step_by(2).copied().collect();
                base.extend(&even);
                covered += edges.len();
                cycles.push([even, odd]);
            }
        }
    }
    // Isolated vertices leave nothing to match.
    (covered == 2 * g.n).then_some(Structure { base, cycles })
}

fn swapped(base: &[usize], cycle: &[Vec<usize>; 2]) -> Vec<usize> {
    let drop: BTreeSet<usize> = cycle[0].iter().copied().collect();
    base.iter().filter(|e| !drop.contains(e)).chain(&cycle[1]).copied().collect()
}

/// Signing of a support graph whose components are paths and even cycles.
///
/// Each cycle whose two matchings disagree in sign gets its largest edge
/// negated; if the base matching then has sign `-1`, every edge at the first
/// row vertex is negated, which flips all perfect matchings at once.
pub fn sign_structured(g: &SupportBipartite) -> Result<EdgeSigning, KasteleynError> {
    if let Some((v, d)) = g.max_degree() {
        if d > 2 {
            return Err(KasteleynError::DegreeTooHigh { axis: g.axis, vertex: g.vertex_label(v), degree: d });
        }
    }
    let mut signing = EdgeSigning::all_plus(g.edges.len());
    let Some(st) = structure(g) else {
        return Ok(signing);
    };
    let base_sign = |s: &EdgeSigning| matching_term_sign(g, &st.base, s);
    for cycle in &st.cycles {
        let alt = swapped(&st.base, cycle);
        if matching_term_sign(g, &alt, &signing) != base_sign(&signing) {
            let e = *cycle[0].iter().chain(&cycle[1]).max().unwrap();
            signing.signs[e] = -signing.signs[e];
        }
    }
    if base_sign(&signing).is_minus() {
        let row = g.edges[st.base[0]].0;
        for (e, &(l, _)) in g.edges.iter().enumerate() {
            if l == row {
                signing.signs[e] = -signing.signs[e];
            }
        }
    }
    Ok(signing)
}

/// Checks a signing of a path/cycle support graph on the base matching and
/// one alternative per cycle.
pub fn verify_structured(g: &SupportBipartite, signing: &EdgeSigning) -> bool {
    let Some(st) = structure(g) else {
        return true;
    };
    matching_term_sign(g, &st.base, signing) == Sign::Plus
        && st.cycles.iter().all(|c| matching_term_sign(g, &swapped(&st.base, c), signing) == Sign::Plus)
}

/// First signing in lexicographic order (`+` before `-`, first edge most
/// significant) with `per = det`.
pub fn sign_bruteforce(g: &SupportBipartite) -> Result<EdgeSigning, KasteleynError> {
    let m = g.edges.len();
    if m > BRUTEFORCE_MAX_EDGES {
        return Err(KasteleynError::TooManyEdges(m));
    }
    let decode = |mask: u32| EdgeSigning {
        signs: (0..m).map(|e| Sign::from_parity(mask >> (m - 1 - e) & 1 == 1)).collect(),
    };
    (0u32..1 << m)
        .into_par_iter()
        .find_first(|&mask| g.verify_by_enumeration(&decode(mask)))
        .map(decode)
        .ok_or(KasteleynError::NotSignable)
}

/// `A'_(v_1..v_k, r) = prod_i sign_i({v_i, r}) * A_(v_1..v_k, r)`.
pub fn sign_hypermatrix<P: Payload>(
    a: &SparseKMatrix<P>,
    graphs: &[SupportBipartite],
    signings: &[EdgeSigning],
) -> Result<SparseKMatrix<P>, KasteleynError> {
    let k = a.axes() - 1;
    if signings.len() != k || graphs.len() != k {
        return Err(KasteleynError::SigningCount { expected: k, got: signings.len().min(graphs.len()) });
    }
    let mut out = a.clone();
    for (idx, entry) in out.entries_mut() {
        let r = idx[k];
        for i in 0..k {
            let e = graphs[i].edge_index(r, idx[i]).ok_or(KasteleynError::MissingEdge(r, idx[i]))?;
            entry.sign *= signings[i].signs[e];
        }
    }
    Ok(out)
}

/// Signs every support graph (structured when possible, brute force
/// otherwise) and applies the signings.
pub fn kasteleyn_sign<P: Payload>(
    a: &SparseKMatrix<P>,
) -> Result<(SparseKMatrix<P>, Vec<SupportBipartite>, Vec<EdgeSigning>), KasteleynError> {
    let graphs = support_graphs(a);
    let signings = graphs
        .iter()
        .map(|g| match sign_structured(g) {
            Err(KasteleynError::DegreeTooHigh { .. }) if g.edges.len() <= BRUTEFORCE_MAX_EDGES => sign_bruteforce(g),
            other => other,
        })
        .collect::<Result<Vec<_>, _>>()?;
    let signed = sign_hypermatrix(a, &graphs, &signings)?;
    Ok((signed, graphs, signings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperalg::{hyper_det_naive, hyper_per_naive};
    use crate::poly::TruncatedPolynomial;

    fn cycle4() -> SupportBipartite {
        SupportBipartite::new(0, 2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    }

    /// per and det of a 2x2 signed matrix by direct expansion.
    fn two_by_two_ok(s: &[Sign]) -> bool {
        // edges: (0,0) (0,1) (1,0) (1,1); det = m00 m11 - m01 m10
        let det_first = s[0] * s[3];
        let det_second = -(s[1] * s[2]);
        det_first == Sign::Plus && det_second == Sign::Plus
    }

    #[test]
    fn four_cycle_signings() {
        let g = cycle4();
        let all: Vec<Vec<Sign>> = (0..16u32)
            .map(|mask| (0..4).map(|e| Sign::from_parity(mask >> (3 - e) & 1 == 1)).collect())
            .collect();
        assert!(!two_by_two_ok(&all[0]));
        for s in &all {
            assert_eq!(two_by_two_ok(s), g.verify_by_enumeration(&EdgeSigning { signs: s.clone() }));
        }
        let structured = sign_structured(&g).unwrap();
        assert!(two_by_two_ok(&structured.signs));
        assert!(verify_structured(&g, &structured));
        let brute = sign_bruteforce(&g).unwrap();
        assert!(two_by_two_ok(&brute.signs));
        assert_eq!(brute.signs, vec![Sign::Plus, Sign::Plus, Sign::Minus, Sign::Plus]);
        let det = |s: &EdgeSigning| hyper_det_sparse(&g.matrix(s), None);
        assert_eq!(det(&structured), det(&brute));
    }

    #[test]
    fn single_edge_and_paths_stay_positive() {
        let g = SupportBipartite::new(0, 1, [(0, 0)]);
        assert_eq!(sign_structured(&g).unwrap(), EdgeSigning::all_plus(1));
        assert_eq!(sign_bruteforce(&g).unwrap(), EdgeSigning::all_plus(1));
        // path r0-c0-r1-c1 with the only matching {r0c0, r1c1}
        let g = SupportBipartite::new(0, 2, [(0, 0), (1, 0), (1, 1)]);
        assert_eq!(sign_bruteforce(&g).unwrap(), EdgeSigning::all_plus(3));
        assert_eq!(sign_structured(&g).unwrap(), EdgeSigning::all_plus(3));
    }

    #[test]
    fn two_disjoint_four_cycles() {
        let g = SupportBipartite::new(
            0,
            4,
            [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)],
        );
        let s = sign_structured(&g).unwrap();
        assert!(g.verify_by_enumeration(&s));
        assert!(verify_structured(&g, &s));
        assert!(!g.verify_by_enumeration(&EdgeSigning::all_plus(8)));
    }

    #[test]
    fn six_cycle_with_crossed_labels() {
        // rows 0,1,2 and columns in a rotated order so the base matching is odd
        let g = SupportBipartite::new(0, 3, [(0, 1), (0, 2), (1, 2), (1, 0), (2, 0), (2, 1)]);
        let s = sign_structured(&g).unwrap();
        assert!(g.verify_by_enumeration(&s));
        assert_eq!(hyper_det_sparse(&g.matrix(&s), None), hyper_det_sparse(&g.matrix(&sign_bruteforce(&g).unwrap()), None));
    }

    #[test]
    fn degree_three_rejected() {
        let k33 = SupportBipartite::new(0, 3, (0..3).flat_map(|l| (0..3).map(move |r| (l, r))));
        assert!(matches!(sign_structured(&k33), Err(KasteleynError::DegreeTooHigh { .. })));
        assert_eq!(sign_bruteforce(&k33), Err(KasteleynError::NotSignable));
    }

    #[test]
    fn support_graph_shapes() {
        let diag: SparseKMatrix<Monomial> = SparseKMatrix::identity(4, 3);
        for g in support_graphs(&diag) {
            assert_eq!(g.edges, vec![(0, 0), (1, 1), (2, 2)]);
        }
        let mut dense = SparseKMatrix::new(3, 2);
        let mut v = 0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    dense.insert(vec![a, b, c], Sign::Plus, Monomial::var(v)).unwrap();
                    v += 1;
                }
            }
        }
        let gs = support_graphs(&dense);
        assert_eq!(gs.len(), 2);
        for g in gs {
            assert_eq!(g.edges, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        }
    }

    #[test]
    fn all_plus_signing_is_identity() {
        let mut a = SparseKMatrix::new(3, 2);
        a.insert(vec![0, 1, 0], Sign::Minus, Monomial::var(0)).unwrap();
        a.insert(vec![1, 0, 1], Sign::Plus, Monomial::var(1)).unwrap();
        let gs = support_graphs(&a);
        let plus: Vec<_> = gs.iter().map(|g| EdgeSigning::all_plus(g.edges.len())).collect();
        assert_eq!(sign_hypermatrix(&a, &gs, &plus).unwrap(), a);
        assert!(sign_hypermatrix(&a, &gs, &plus[..1]).is_err());
    }

    #[test]
    fn per_equals_det_after_signing_cycle_supports() {
        // A 3-axis matrix whose supports are 4-cycles.
        let mut a = SparseKMatrix::new(3, 2);
        a.insert(vec![0, 0, 0], Sign::Plus, Monomial::var(0)).unwrap();
        a.insert(vec![1, 1, 1], Sign::Plus, Monomial::var(1)).unwrap();
        a.insert(vec![1, 1, 0], Sign::Plus, Monomial::var(2)).unwrap();
        a.insert(vec![0, 0, 1], Sign::Plus, Monomial::var(3)).unwrap();
        let (signed, _, _) = kasteleyn_sign(&a).unwrap();
        let per: TruncatedPolynomial = hyper_per_naive(&a).unwrap();
        assert_eq!(hyper_det_naive(&signed).unwrap(), per);
    }

    #[test]
    fn componentwise_check_matches_whole_matrix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=5);
            let edges: Vec<(usize, usize)> =
                (0..rng.gen_range(0..=2 * n)).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            let g = SupportBipartite::new(0, n, edges);
            let s = EdgeSigning { signs: (0..g.edges.len()).map(|_| Sign::from_parity(rng.gen_bool(0.5))).collect() };
            let whole = hyper_per_naive(&g.matrix(&EdgeSigning::all_plus(g.edges.len()))).unwrap()
                == hyper_det_naive(&g.matrix(&s)).unwrap();
            assert_eq!(g.verify_by_enumeration(&s), whole, "{g:?} {s:?}");
        }
    }
}
