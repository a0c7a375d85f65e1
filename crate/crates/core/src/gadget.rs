//! The 3-partite to 4-partite lift, contraction to a directed hypergraph,
//! and normalization of a signed transition matrix to `I + A`.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::hyperalg::{PartOrders, SparseKMatrix, ZPower};
use crate::hypergraph::{DirectedHypergraph, HypergraphError, KPartiteHypergraph, Matching};
use crate::poly::{Monomial, VarId};
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("construction check failed: {0}")]
    Invariant(String),
    #[error("matching is not the lift of any perfect matching")]
    NotInImage,
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

const X: [usize; 4] = [1, 2, 3, 4];

/// Indices into `H'` of everything built for one source edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGadget {
    /// The 40 per-edge vertices: `e_1..e_4`, then `e_k^j`, then `e_k^j(l)`.
    pub vertices: Vec<usize>,
    pub e1: usize,
    pub e2: usize,
    /// `F_1, F_2, F_3`.
    pub f: [usize; 3],
    /// `F_k^j` for `k = 1..3`, `j` ascending in `X \ {k}`.
    pub fj: Vec<usize>,
    /// `Q_k^m` for `k = 1..3`, `m = 1..3`.
    pub q: Vec<usize>,
    pub m1: Vec<usize>,
    pub m2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetMap {
    pub edges: Vec<EdgeGadget>,
    /// For each source vertex, its three new vertices `v^j`, `j` ascending.
    pub vertex_copies: Vec<Vec<usize>>,
    /// Source edge of every edge of `H'`.
    pub owner: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub h: KPartiteHypergraph,
    pub p: Matching,
    pub map: GadgetMap,
}

impl Gadget {
    /// `Q' = U M1(e) (e in Q) U M2(e) (e not in Q)`.
    pub fn lift_matching(&self, q: &Matching) -> Matching {
        let mut out = Vec::new();
        for (e, g) in self.map.edges.iter().enumerate() {
            out.extend(if q.contains(e) { &g.m1 } else { &g.m2 });
        }
        Matching::new(out)
    }

    /// Inverse of `lift_matching`.
    pub fn project_matching(&self, q: &Matching) -> Result<Matching, GadgetError> {
        let src = Matching::new(
            self.map.edges.iter().enumerate().filter(|(_, g)| q.contains(g.e1)).map(|(e, _)| e).collect(),
        );
        if &self.lift_matching(&src) != q {
            return Err(GadgetError::NotInImage);
        }
        Ok(src)
    }
}

fn check_preconditions(h: &KPartiteHypergraph, p: &Matching) -> Result<(), GadgetError> {
    if h.k() != 3 {
        return Err(GadgetError::Precondition(format!("need a 3-partite hypergraph, got k = {}", h.k())));
    }
    if let Some((a, b)) = h.first_overlap() {
        return Err(GadgetError::Precondition(format!(
            "not almost disjoint: edges {} and {} share two vertices",
            h.edge_label(a),
            h.edge_label(b)
        )));
    }
    h.check_perfect(p).map_err(|e| GadgetError::Precondition(e.to_string()))?;
    if let Some(&e) = p.edges().iter().find(|&&e| !h.edge(e).weight.is_zero()) {
        return Err(GadgetError::Precondition(format!("matching edge {} has nonzero weight", h.edge_label(e))));
    }
    Ok(())
}

/// For source position `k`, the three `Q_k^m` as lists of leaves `(j, l)`:
/// `Q_k^m` takes one leaf from each `F_k^j` and covers the parts other than
/// `j_m`. Lexicographically least by `m`, then part, then `j`.
fn q_system(k: usize) -> [Vec<(usize, usize)>; 3] {
    let js: Vec<usize> = X.iter().copied().filter(|&j| j != k).collect();
    let mut used = BTreeSet::new();
    let mut out: [Vec<(usize, usize)>; 3] = Default::default();

    fn rec(
        js: &[usize],
        m: usize,
        slot: usize,
        used: &mut BTreeSet<(usize, usize)>,
        out: &mut [Vec<(usize, usize)>; 3],
    ) -> bool {
        if m == 3 {
            return true;
        }
        let parts: Vec<usize> = X.iter().copied().filter(|&l| l != js[m]).collect();
        if slot == parts.len() {
            return rec(js, m + 1, 0, used, out);
        }
        let l = parts[slot];
        for &j in js {
            let leaf = (j, l);
            if j == l || used.contains(&leaf) || out[m].iter().any(|&(jj, _)| jj == j) {
                continue;
            }
            used.insert(leaf);
            out[m].push(leaf);
            if rec(js, m, slot + 1, used, out) {
                return true;
            }
            out[m].pop();
            used.remove(&leaf);
        }
        false
    }

    assert!(rec(&js, 0, 0, &mut used, &mut out), "a Q system always exists");
    out
}

/// Builds `H'`, `P'` and `w'` from an almost disjoint 3-partite `H`, a
/// perfect matching `P` and weights vanishing on `P`.
pub fn build_gadget(h: &KPartiteHypergraph, p: &Matching) -> Result<Gadget, GadgetError> {
    check_preconditions(h, p)?;
    let n = h.part_size(0);
    let m = h.edges().len();

    // Lay out the parts: original vertices, per-edge vertices, per-vertex copies.
    let mut parts: Vec<Vec<String>> = (0..4).map(|p| if p < 3 { h.parts()[p].clone() } else { Vec::new() }).collect();
    let place = |parts: &mut Vec<Vec<String>>, part: usize, name: String| {
        parts[part - 1].push(name);
        (part - 1, parts[part - 1].len() - 1)
    };
    let mut edge_slots = Vec::with_capacity(m);
    for e in 0..m {
        let tag = h.edge_label(e);
        let mut slots = Vec::with_capacity(40);
        for i in X {
            slots.push(place(&mut parts, i, format!("{tag}_{i}")));
        }
        for k in 1..=3 {
            for j in X.iter().copied().filter(|&j| j != k) {
                slots.push(place(&mut parts, j, format!("{tag}_{k}^{j}")));
            }
        }
        for k in 1..=3 {
            for j in X.iter().copied().filter(|&j| j != k) {
                for l in X.iter().copied().filter(|&l| l != j) {
                    slots.push(place(&mut parts, l, format!("{tag}_{k}^{j}({l})")));
                }
            }
        }
        edge_slots.push(slots);
    }
    let mut vertex_slots = Vec::with_capacity(h.vertex_count());
    for v in 0..h.vertex_count() {
        let k = h.locate(v).0 + 1;
        let name = h.vertex_name(v).to_string();
        vertex_slots.push(
            X.iter()
                .copied()
                .filter(|&j| j != k)
                .map(|j| place(&mut parts, j, format!("{name}^{j}")))
                .collect::<Vec<_>>(),
        );
    }

    let mut hp = KPartiteHypergraph::new(parts)?;
    let id = |(p, i): (usize, usize)| hp.global(p, i);
    let edge_ids: Vec<Vec<usize>> = edge_slots.iter().map(|s| s.iter().map(|&x| id(x)).collect()).collect();
    let vertex_copies: Vec<Vec<usize>> = vertex_slots.iter().map(|s| s.iter().map(|&x| id(x)).collect()).collect();
    // Original vertices keep their positions in parts 1..3.
    let orig: Vec<usize> = (0..h.vertex_count())
        .map(|v| {
            let (p, i) = h.locate(v);
            hp.global(p, i)
        })
        .collect();

    let q_systems: Vec<[Vec<(usize, usize)>; 3]> = (1..=3).map(q_system).collect();
    let mut gadgets = Vec::with_capacity(m);
    let mut owner = Vec::with_capacity(23 * m);
    for e in 0..m {
        let tag = h.edge_label(e);
        let ids = &edge_ids[e];
        let ei = |i: usize| ids[i - 1];
        // e_k^j and e_k^j(l) lookups follow the layout order above.
        let ekj = |k: usize, j: usize| {
            let mut idx = 4;
            for kk in 1..=3 {
                for jj in X.iter().copied().filter(|&jj| jj != kk) {
                    if (kk, jj) == (k, j) {
                        return ids[idx];
                    }
                    idx += 1;
                }
            }
            unreachable!()
        };
        let leaf = |k: usize, j: usize, l: usize| {
            let mut idx = 13;
            for kk in 1..=3 {
                for jj in X.iter().copied().filter(|&jj| jj != kk) {
                    for ll in X.iter().copied().filter(|&ll| ll != jj) {
                        if (kk, jj, ll) == (k, j, l) {
                            return ids[idx];
                        }
                        idx += 1;
                    }
                }
            }
            unreachable!()
        };
        let src = &h.edge(e).verts;
        let zero = BigRational::zero;
        let mut add = |hp: &mut KPartiteHypergraph, verts: Vec<usize>, w: BigRational, name: String| {
            owner.push(e);
            hp.add_edge(&verts, w, Some(name))
        };

        let mut e1_verts: Vec<usize> = src.iter().map(|&v| orig[v]).collect();
        e1_verts.push(ei(4));
        let e1 = add(&mut hp, e1_verts, h.edge(e).weight.clone(), format!("E1({tag})"))?;
        let e2 = add(&mut hp, X.iter().map(|&i| ei(i)).collect(), zero(), format!("E2({tag})"))?;
        let mut f = [0; 3];
        for k in 1..=3 {
            let mut verts = vec![ei(k)];
            verts.extend(X.iter().copied().filter(|&j| j != k).map(|j| ekj(k, j)));
            f[k - 1] = add(&mut hp, verts, zero(), format!("F{k}({tag})"))?;
        }
        let mut fj = Vec::with_capacity(9);
        for k in 1..=3 {
            for j in X.iter().copied().filter(|&j| j != k) {
                let mut verts = vec![ekj(k, j)];
                verts.extend(X.iter().copied().filter(|&l| l != j).map(|l| leaf(k, j, l)));
                fj.push(add(&mut hp, verts, zero(), format!("F{k}^{j}({tag})"))?);
            }
        }
        let mut q = Vec::with_capacity(9);
        for k in 1..=3 {
            let v = src[k - 1];
            let js: Vec<usize> = X.iter().copied().filter(|&j| j != k).collect();
            for (mi, leaves) in q_systems[k - 1].iter().enumerate() {
                let mut verts = vec![vertex_copies[v][mi]];
                debug_assert_eq!(hp.locate(vertex_copies[v][mi]).0 + 1, js[mi]);
                verts.extend(leaves.iter().map(|&(j, l)| leaf(k, j, l)));
                q.push(add(&mut hp, verts, zero(), format!("Q{k}^{}({tag})", mi + 1))?);
            }
        }
        let mut m1 = vec![e1];
        m1.extend(f);
        m1.extend(&q);
        let mut m2 = vec![e2];
        m2.extend(&fj);
        m1.sort_unstable();
        m2.sort_unstable();
        gadgets.push(EdgeGadget { vertices: ids.clone(), e1, e2, f, fj, q, m1, m2 });
    }

    let map = GadgetMap { edges: gadgets, vertex_copies, owner };
    let mut gadget = Gadget { h: hp, p: Matching::new(Vec::new()), map };
    gadget.p = gadget.lift_matching(p);
    validate(h, &gadget, n, m)?;
    Ok(gadget)
}

fn validate(h: &KPartiteHypergraph, g: &Gadget, n: usize, m: usize) -> Result<(), GadgetError> {
    let fail = |msg: String| Err(GadgetError::Invariant(msg));
    for part in 0..4 {
        if g.h.part_size(part) != 3 * n + 10 * m {
            return fail(format!("part {} has {} vertices, expected {}", part + 1, g.h.part_size(part), 3 * n + 10 * m));
        }
    }
    if g.h.edges().len() != 23 * m {
        return fail(format!("{} edges, expected {}", g.h.edges().len(), 23 * m));
    }
    if let Some((a, b)) = g.h.first_overlap() {
        return fail(format!("edges {} and {} share two vertices", g.h.edge_label(a), g.h.edge_label(b)));
    }
    let cover = |edges: &[usize]| -> Option<BTreeSet<usize>> {
        let mut seen = BTreeSet::new();
        for &e in edges {
            for &v in &g.h.edge(e).verts {
                if !seen.insert(v) {
                    return None;
                }
            }
        }
        Some(seen)
    };
    for (e, eg) in g.map.edges.iter().enumerate() {
        if eg.m1.len() != 13 || eg.m2.len() != 10 {
            return fail(format!("edge {e}: |M1| = {}, |M2| = {}", eg.m1.len(), eg.m2.len()));
        }
        let own: BTreeSet<usize> = eg.vertices.iter().copied().collect();
        let mut expect1 = own.clone();
        for &v in &h.edge(e).verts {
            let (p, i) = h.locate(v);
            expect1.insert(g.h.global(p, i));
            expect1.extend(&g.map.vertex_copies[v]);
        }
        if cover(&eg.m1) != Some(expect1) {
            return fail(format!("M1 of edge {} has the wrong cover", h.edge_label(e)));
        }
        if cover(&eg.m2) != Some(own) {
            return fail(format!("M2 of edge {} has the wrong cover", h.edge_label(e)));
        }
    }
    g.h.check_perfect(&g.p).map_err(|e| GadgetError::Invariant(format!("P': {e}")))?;
    if g.p.edges().iter().any(|&e| !g.h.edge(e).weight.is_zero()) {
        return fail("P' carries nonzero weight".into());
    }
    Ok(())
}

/// `D(H, P)` together with the orders it induces.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub d: DirectedHypergraph,
    /// Induced order of every part, as global vertex ids of `H`.
    pub orders: PartOrders,
    /// Matching edges in induced order.
    pub p_order: Vec<usize>,
    /// Hyperedge of `D` for each edge of `H` outside `P`.
    pub arc_of: Vec<Option<usize>>,
    /// Edge of `H` for each hyperedge of `D`.
    pub edge_of_arc: Vec<usize>,
}

/// Contracts the matching `p`: vertices are the first part in input order,
/// and each edge `e` outside `p` becomes the hyperedge whose `i`-th vertex
/// is the first-part vertex of the matching edge through `e_i`.
pub fn contract(h: &KPartiteHypergraph, p: &Matching) -> Result<Contraction, GadgetError> {
    if let Some((a, b)) = h.first_overlap() {
        return Err(GadgetError::Precondition(format!(
            "not almost disjoint: edges {} and {} share two vertices",
            h.edge_label(a),
            h.edge_label(b)
        )));
    }
    h.check_perfect(p).map_err(|e| GadgetError::Precondition(e.to_string()))?;
    let k = h.k();
    let n = h.part_size(0);
    let mut through = vec![usize::MAX; h.vertex_count()];
    for &e in p.edges() {
        for &v in &h.edge(e).verts {
            through[v] = e;
        }
    }
    let p_order: Vec<usize> = (0..n).map(|i| through[h.global(0, i)]).collect();
    let mut rank = vec![0; h.edges().len()];
    for (i, &e) in p_order.iter().enumerate() {
        rank[e] = i;
    }
    let orders: PartOrders = (0..k).map(|part| p_order.iter().map(|&e| h.edge(e).verts[part]).collect()).collect();
    let names: Vec<String> = (0..n).map(|i| h.vertex_name(h.global(0, i)).to_string()).collect();
    let mut d = DirectedHypergraph::new(k, names)?;
    let mut arc_of = vec![None; h.edges().len()];
    let mut edge_of_arc = Vec::new();
    for (e, edge) in h.edges().iter().enumerate() {
        if p.contains(e) {
            continue;
        }
        let verts = edge.verts.iter().map(|&v| rank[through[v]]).collect();
        arc_of[e] = Some(d.push(verts, edge.weight.clone(), Sign::Plus)?);
        edge_of_arc.push(e);
    }
    Ok(Contraction { d, orders, p_order, arc_of, edge_of_arc })
}

/// `T(H, x)` in the induced orders with `x_p = 1` on the matching, next to
/// `I + A(D, y)` with `y_a(e) = x_e`. Variables are edge indices of `H`.
pub fn contraction_sides(
    h: &KPartiteHypergraph,
    p: &Matching,
    c: &Contraction,
) -> (SparseKMatrix<Monomial>, SparseKMatrix<Monomial>) {
    let k = h.k();
    let n = h.part_size(0);
    let mut pos = vec![0; h.vertex_count()];
    for order in &c.orders {
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
    }
    let mut t = SparseKMatrix::new(k, n);
    for (e, edge) in h.edges().iter().enumerate() {
        let payload = if p.contains(e) { Monomial::one() } else { Monomial::var(e as VarId) };
        t.insert(edge.verts.iter().map(|&v| pos[v]).collect(), Sign::Plus, payload).expect("in range");
    }
    let mut a = SparseKMatrix::new(k, n);
    for (arc, hyper) in c.d.hyperedges().iter().enumerate() {
        a.insert(hyper.verts.clone(), hyper.sign, Monomial::var(c.edge_of_arc[arc] as VarId)).expect("in range");
    }
    (t, a.plus_identity())
}

/// Whether `T(H, x) = I + A(D(H, P), y)` holds entrywise.
pub fn contraction_identity_holds(h: &KPartiteHypergraph, p: &Matching, c: &Contraction) -> bool {
    let (t, ia) = contraction_sides(h, p, c);
    t == ia
}

/// Flips every hyper-row whose diagonal entry is `-1` and reads off the
/// off-diagonal part as a signed directed hypergraph `A''`, so that the
/// flipped matrix is `I + A''`. Returns `A''` and the flipped rows.
pub fn normalize_to_identity(
    t: &SparseKMatrix<ZPower>,
    vertices: Vec<String>,
) -> Result<(DirectedHypergraph, Vec<usize>), GadgetError> {
    let k = t.axes();
    let mut flips = Vec::new();
    let mut m = t.clone();
    for i in 0..t.n() {
        match t.get(&vec![i; k]) {
            Some(e) if e.payload.0.is_zero() => {
                if e.sign.is_minus() {
                    m = m.flip_hyper_row(i);
                    flips.push(i);
                }
            }
            _ => return Err(GadgetError::Invariant(format!("diagonal entry {i} is not a unit"))),
        }
    }
    let mut d = DirectedHypergraph::new(k, vertices)?;
    for (idx, e) in m.entries() {
        if idx.iter().all(|&c| c == idx[0]) {
            continue;
        }
        d.push(idx.clone(), e.payload.0.clone(), e.sign)?;
    }
    Ok((d, flips))
}
