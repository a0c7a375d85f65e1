//! The full chain from a 3-partite hypergraph with a perfect matching to a
//! signed 4-dimensional determinant and its truncated product expansion,
//! with an exact check after every stage.

use std::fmt::Write as _;

use hyperzeta::circulations::{
    circuit_cover_expansion, enumerate_circulations, CircuitError, EnumerationError, EnumerationLimits,
};
use hyperzeta::circulations::enumerate::product_from;
use hyperzeta::gadget::{build_gadget, contract, contraction_identity_holds, normalize_to_identity};
use hyperzeta::hyperalg::{
    adjacency_matrix_z, det_identity_minus, hyper_det_sparse, hyper_per_sparse, input_orders, transition_matrix_z,
};
use hyperzeta::hypergraph::{KPartiteHypergraph, Matching};
use hyperzeta::kasteleyn::kasteleyn_sign;
use hyperzeta::poly::{TruncatedPolynomial, WeightSeries};
use hyperzeta::Sign;
use serde_json::{json, Value};

/// How a stage failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// The input or an intermediate object violates a precondition.
    Precondition,
    /// An exact equality did not hold.
    Mismatch,
    /// An enumeration ceiling was hit.
    Limit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineError {
    pub stage: usize,
    pub name: &'static str,
    pub kind: FailureKind,
    pub message: String,
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {} ({}): {}", self.stage, self.name, self.message)
    }
}

impl std::error::Error for PipelineError {}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub max_degree: u32,
    pub limits: EnumerationLimits,
    pub circuit_limit: u64,
    /// Also count the perfect matchings of `H'` by enumeration.
    pub count_matchings: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            max_degree: 3,
            limits: EnumerationLimits::default(),
            circuit_limit: hyperzeta::circulations::circuits::DEFAULT_CIRCUIT_LIMIT,
            count_matchings: true,
        }
    }
}

/// One verified equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub parts: usize,
    pub part_size: usize,
    pub edges: usize,
    pub enumerator: WeightSeries,
    pub gadget_part_size: usize,
    pub gadget_edges: usize,
    pub matchings: Option<(usize, usize)>,
    pub negated_entries: usize,
    pub d_vertices: usize,
    pub d_hyperedges: usize,
    pub flips: Vec<usize>,
    /// `W = global_sign * det(I + A'')`.
    pub global_sign: Sign,
    pub max_degree: u32,
    pub circulations: usize,
    pub product: TruncatedPolynomial,
    pub checks: Vec<Check>,
}

struct Stages {
    next: usize,
}

impl Stages {
    fn fail(&self, name: &'static str, kind: FailureKind, message: impl Into<String>) -> PipelineError {
        PipelineError { stage: self.next, name, kind, message: message.into() }
    }
}

fn series_mismatch(lhs: &str, a: &WeightSeries, rhs: &str, b: &WeightSeries) -> String {
    let (e, ca, cb) = a.first_difference(b).expect("series differ");
    let z = WeightSeries::monomial(e, 1.into());
    format!("{lhs} = {a} but {rhs} = {b}; first difference at {z}: {ca} vs {cb}")
}

fn poly_mismatch(lhs: &str, a: &TruncatedPolynomial, rhs: &str, b: &TruncatedPolynomial) -> String {
    let (m, ca, cb) = a.first_difference(b).expect("polynomials differ");
    format!("{lhs} and {rhs} differ; first difference at {m}: {ca} vs {cb}")
}

pub fn run_pipeline(h: &KPartiteHypergraph, p: &Matching, opts: &PipelineOptions) -> Result<PipelineReport, PipelineError> {
    use FailureKind::*;
    let mut st = Stages { next: 0 };
    let mut checks = Vec::new();

    // 0: input
    if h.k() != 3 {
        return Err(st.fail("input", Precondition, format!("expected 3 parts, got {}", h.k())));
    }
    h.check_perfect(p).map_err(|e| st.fail("input", Precondition, e.to_string()))?;
    let enumerator = h.matching_enumerator();
    st.next += 1;

    // 1: gadget
    let g = build_gadget(h, p).map_err(|e| st.fail("gadget", Precondition, e.to_string()))?;
    let c = contract(&g.h, &g.p).map_err(|e| st.fail("gadget", Precondition, e.to_string()))?;
    let t_src = transition_matrix_z(h, &input_orders(h)).map_err(|e| st.fail("gadget", Precondition, e.to_string()))?;
    let t = transition_matrix_z(&g.h, &c.orders).map_err(|e| st.fail("gadget", Precondition, e.to_string()))?;
    let per_src = hyper_per_sparse(&t_src, None);
    let per_gadget = hyper_per_sparse(&t, None);
    if per_src != per_gadget || per_src != enumerator {
        return Err(st.fail("gadget", Mismatch, series_mismatch("per(T(H))", &per_src, "per(T(H'))", &per_gadget)));
    }
    checks.push(Check { name: "permanent", detail: format!("per(T(H)) = per(T(H')) = {per_src}") });
    let matchings = if opts.count_matchings {
        let a = h.perfect_matchings().count();
        let b = g.h.perfect_matchings().count();
        if a != b {
            return Err(st.fail("gadget", Mismatch, format!("H has {a} perfect matchings, H' has {b}")));
        }
        checks.push(Check { name: "matchings", detail: format!("H and H' both have {a} perfect matchings") });
        Some((a, b))
    } else {
        None
    };
    st.next += 1;

    // 2: sign
    let (signed, graphs, signings) = kasteleyn_sign(&t).map_err(|e| st.fail("sign", Precondition, e.to_string()))?;
    for (gi, s) in graphs.iter().zip(&signings) {
        if !gi.verify_by_enumeration(s) {
            return Err(st.fail("sign", Mismatch, format!("support graph {} is not signed correctly", gi.axis + 1)));
        }
    }
    let det_signed = hyper_det_sparse(&signed, None);
    if det_signed != per_gadget {
        return Err(st.fail("sign", Mismatch, series_mismatch("det(T')", &det_signed, "per(T(H'))", &per_gadget)));
    }
    let negated_entries = signed.entries().filter(|(_, e)| e.sign.is_minus()).count();
    checks.push(Check {
        name: "signing",
        detail: format!(
            "per(T(H')) = det(T'); {} support graphs verified; {negated_entries} entries negated",
            graphs.len()
        ),
    });
    st.next += 1;

    // 3: contract
    if !contraction_identity_holds(&g.h, &g.p, &c) {
        return Err(st.fail("contract", Mismatch, "T(H', x) differs from I + A(D, y)"));
    }
    checks.push(Check {
        name: "contract",
        detail: format!("T(H', x) = I + A(D, y); D has {} vertices, {} hyperedges", c.d.vertex_count(), c.d.len()),
    });
    st.next += 1;

    // 4: normalize
    let (a2, flips) =
        normalize_to_identity(&signed, c.d.vertices().to_vec()).map_err(|e| st.fail("normalize", Precondition, e.to_string()))?;
    let det_norm = hyper_det_sparse(&adjacency_matrix_z(&a2).plus_identity(), None);
    let global_sign = if det_norm == enumerator {
        Sign::Plus
    } else if det_norm == enumerator.neg() {
        Sign::Minus
    } else {
        return Err(st.fail("normalize", Mismatch, series_mismatch("det(I + A'')", &det_norm, "W", &enumerator)));
    };
    if global_sign != Sign::from_parity(flips.len() % 2 == 1) {
        return Err(st.fail("normalize", Mismatch, format!("global sign {global_sign} disagrees with {} row flips", flips.len())));
    }
    checks.push(Check {
        name: "normalize",
        detail: format!(
            "W = {}det(I + A''); det(I + A'') = {det_norm}; {} rows flipped",
            if global_sign.is_minus() { "-" } else { "" },
            flips.len()
        ),
    });
    st.next += 1;

    // 5: bass4 on D'' = -A'', so that det(I - A(D'')) = det(I + A'')
    let d2 = a2.negated();
    let cap = opts.max_degree;
    let circs = enumerate_circulations(&d2, cap as usize, opts.limits).map_err(|e: EnumerationError| st.fail("bass4", Limit, e.to_string()))?;
    let product = product_from(&d2, &circs, cap);
    let det = det_identity_minus(&d2, cap);
    if product != det {
        return Err(st.fail("bass4", Mismatch, poly_mismatch("product", &product, "det(I - A)", &det)));
    }
    checks.push(Check {
        name: "bass4",
        detail: format!("product = det(I - A) = {det} up to degree {cap}; {} circulations", circs.len()),
    });
    let cover = circuit_cover_expansion(&d2, Some(cap), opts.circuit_limit).map_err(|e: CircuitError| st.fail("bass4", Limit, e.to_string()))?;
    if cover != det {
        return Err(st.fail("bass4", Mismatch, poly_mismatch("circuit expansion", &cover, "det(I - A)", &det)));
    }
    checks.push(Check { name: "circuits", detail: format!("circuit expansion = det(I - A) up to degree {cap}") });

    Ok(PipelineReport {
        parts: h.k(),
        part_size: h.part_size(0),
        edges: h.edges().len(),
        enumerator,
        gadget_part_size: g.h.part_size(0),
        gadget_edges: g.h.edges().len(),
        matchings,
        negated_entries,
        d_vertices: c.d.vertex_count(),
        d_hyperedges: c.d.len(),
        flips,
        global_sign,
        max_degree: cap,
        circulations: circs.len(),
        product,
        checks,
    })
}

impl PipelineReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "input       {} parts of size {}, {} edges", self.parts, self.part_size, self.edges).unwrap();
        writeln!(s, "enumerator  {}", self.enumerator).unwrap();
        writeln!(s, "gadget      4 parts of size {}, {} edges", self.gadget_part_size, self.gadget_edges).unwrap();
        writeln!(s, "sign        {}", self.global_sign).unwrap();
        for c in &self.checks {
            writeln!(s, "PASS  {:<10}  {}", c.name, c.detail).unwrap();
        }
        s.push_str("PASS\n");
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": "PASS",
            "input": {"parts": self.parts, "part_size": self.part_size, "edges": self.edges},
            "enumerator": self.enumerator.to_string(),
            "gadget": {
                "part_size": self.gadget_part_size,
                "edges": self.gadget_edges,
                "matchings": self.matchings.map(|(a, _)| a),
            },
            "signing": {"negated_entries": self.negated_entries},
            "contraction": {"vertices": self.d_vertices, "hyperedges": self.d_hyperedges},
            "normalize": {"flipped_rows": self.flips, "global_sign": self.global_sign.to_string()},
            "bass4": {
                "max_degree": self.max_degree,
                "circulations": self.circulations,
                "product": self.product.to_string(),
            },
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": true, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}
