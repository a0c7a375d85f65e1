//! Command-line driver: JSON in, canonical text (or `--json`) out.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 unreadable or invalid
//! input (including exceeded enumeration limits).

pub mod pipeline;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hyperzeta::circulations::circuits::DEFAULT_CIRCUIT_LIMIT;
use hyperzeta::circulations::{coin_lemma_check, enumerate_circulations, is2_truncated, EnumerationLimits};
use hyperzeta::circulations::enumerate::product_from;
use hyperzeta::codes::{even_set_enumerator_with_limit, weight_enumerator_with_limit, DEFAULT_MAX_DIM};
use hyperzeta::gadget::{build_gadget, contract, contraction_identity_holds, Gadget};
use hyperzeta::hyperalg::{det_identity_minus, hyper_det_sparse, hyper_per_sparse, input_orders, transition_matrix_z};
use hyperzeta::hypergraph::{KPartiteHypergraph, Matching};
use hyperzeta::io::{self, CodeFile, DigraphFile, DirectedHypergraphFile, GraphFile, HypergraphFile};
use hyperzeta::kasteleyn::kasteleyn_sign;
use hyperzeta::poly::TruncatedPolynomial;
use serde_json::{json, Value};

use pipeline::{run_pipeline, FailureKind, PipelineOptions};

#[derive(Parser, Debug)]
#[command(name = "hyperzeta", version, about = "Exact checks for matchings, hyperdeterminants and Ihara-Selberg products")]
pub struct Cli {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Limits {
    /// Ceiling on hyperedge multisets visited by circulation enumeration.
    #[arg(long, default_value_t = EnumerationLimits::default().max_multisets)]
    pub max_multisets: u64,
    /// Ceiling on connector systems of a single multiset.
    #[arg(long, default_value_t = EnumerationLimits::default().max_systems)]
    pub max_systems: u64,
    /// Ceiling on search states of the circuit enumeration.
    #[arg(long, default_value_t = DEFAULT_CIRCUIT_LIMIT)]
    pub max_circuit_states: u64,
}

impl Limits {
    fn enumeration(&self) -> EnumerationLimits {
        EnumerationLimits { max_multisets: self.max_multisets, max_systems: self.max_systems }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the whole chain on a 3-partite hypergraph with a perfect matching.
    Pipeline {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
        /// Skip counting perfect matchings of the gadget.
        #[arg(long)]
        no_matching_count: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Weight enumerator of a binary code.
    Wenum {
        #[arg(long = "in")]
        input: PathBuf,
        /// Largest code dimension enumerated.
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Even-set enumerator of a graph.
    Evenset {
        #[arg(long = "in")]
        input: PathBuf,
        /// Compare with the weight enumerator of the cycle-space code.
        #[arg(long)]
        verify: bool,
        /// Largest edge count (and code dimension) enumerated.
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Perfect matchings of a k-partite hypergraph.
    Pm {
        #[arg(long = "in")]
        input: PathBuf,
        /// Compare the count and generating function with the permanent.
        #[arg(long)]
        verify: bool,
    },
    /// Lift a 3-partite hypergraph with a perfect matching to the 4-partite gadget.
    Gadget {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sidecar with the per-edge and per-vertex gadget bookkeeping.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Kasteleyn-sign the transition matrix of a hypergraph.
    Sign {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contract the perfect matching of a k-partite hypergraph.
    Contract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check T(H, x) = I + A(D, y) entrywise.
        #[arg(long)]
        verify: bool,
    },
    /// Truncated product over closed walks of a digraph.
    Bass2 {
        #[arg(long = "in", alias = "digraph")]
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        /// Compare with det(I - A).
        #[arg(long)]
        verify: bool,
    },
    /// Truncated product over circulations of a directed hypergraph.
    Bass4 {
        #[arg(long = "in", alias = "dhg")]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
        /// Compare with det(I - A).
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Alternating count of coin arrangements for a multiplicity profile.
    Coin {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<u32>,
    },
}

/// What a command printed and how it should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn invalid(msg: impl std::fmt::Display) -> Self {
        Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 2 }
    }
}

type CmdResult = Result<Outcome, Outcome>;

fn read<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T, Outcome> {
    let text = fs::read_to_string(path).map_err(|e| Outcome::invalid(format!("{}: {e}", path.display())))?;
    io::parse(&text).map_err(|e| Outcome::invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Outcome> {
    fs::write(path, text).map_err(|e| Outcome::invalid(format!("{}: {e}", path.display())))
}

fn emit(json_mode: bool, value: Value, text: String, code: i32) -> Outcome {
    let stdout = if json_mode { io::to_pretty(&value) } else { text };
    Outcome { stdout, stderr: String::new(), code }
}

fn read_hypergraph(path: &Path) -> Result<(KPartiteHypergraph, Option<Matching>), Outcome> {
    read::<HypergraphFile>(path)?.to_hypergraph().map_err(Outcome::invalid)
}

fn need_matching(m: Option<Matching>) -> Result<Matching, Outcome> {
    m.ok_or_else(|| Outcome::invalid("input has no \"matching\""))
}

/// Text and JSON for a product-versus-determinant comparison.
fn compare(json_mode: bool, product: &TruncatedPolynomial, det: &TruncatedPolynomial, extra: Value) -> Outcome {
    match product.first_difference(det) {
        None => emit(
            json_mode,
            json!({"status": "PASS", "det": det.to_string(), "details": extra}),
            format!("PASS  det = {det}\n"),
            0,
        ),
        Some((m, a, b)) => emit(
            json_mode,
            json!({"status": "FAIL", "monomial": m.to_string(), "product": a.to_string(), "det": b.to_string(), "details": extra}),
            format!("FAIL  first difference at {m}: product {a}, det {b}\n"),
            1,
        ),
    }
}

pub fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(cli.command, cli.json) {
        Ok(o) | Err(o) => o,
    }
}

fn dispatch(cmd: Command, j: bool) -> CmdResult {
    match cmd {
        Command::Pipeline { input, max_degree, no_matching_count, limits } => {
            let (h, m) = read_hypergraph(&input)?;
            let p = need_matching(m)?;
            let opts = PipelineOptions {
                max_degree,
                limits: limits.enumeration(),
                circuit_limit: limits.max_circuit_states,
                count_matchings: !no_matching_count,
            };
            match run_pipeline(&h, &p, &opts) {
                Ok(r) => Ok(emit(j, r.to_json(), r.render(), 0)),
                Err(e) => {
                    let code = if e.kind == FailureKind::Mismatch { 1 } else { 2 };
                    let v = json!({"status": "FAIL", "stage": e.stage, "name": e.name, "message": e.message});
                    Ok(emit(j, v, format!("FAIL  {e}\n"), code))
                }
            }
        }
        Command::Wenum { input, max_dim } => {
            let code = read::<CodeFile>(&input)?.to_code().map_err(Outcome::invalid)?;
            let w = weight_enumerator_with_limit(&code, max_dim).map_err(Outcome::invalid)?;
            Ok(emit(j, json!({"enumerator": w.to_string()}), format!("{w}\n"), 0))
        }
        Command::Evenset { input, verify, max_dim } => {
            let (g, weights) = read::<GraphFile>(&input)?.to_graph().map_err(Outcome::invalid)?;
            let even = even_set_enumerator_with_limit(&g, &weights, max_dim).map_err(Outcome::invalid)?;
            if !verify {
                return Ok(emit(j, json!({"enumerator": even.to_string()}), format!("{even}\n"), 0));
            }
            let code = g.cycle_space(weights).map_err(Outcome::invalid)?;
            let kernel = weight_enumerator_with_limit(&code, max_dim).map_err(Outcome::invalid)?;
            Ok(if even == kernel {
                emit(j, json!({"status": "PASS", "enumerator": even.to_string()}), format!("PASS  even sets = cycle-space code = {even}\n"), 0)
            } else {
                let v = json!({"status": "FAIL", "even_sets": even.to_string(), "code": kernel.to_string()});
                emit(j, v, format!("FAIL  even sets {even}, cycle-space code {kernel}\n"), 1)
            })
        }
        Command::Pm { input, verify } => {
            let (h, _) = read_hypergraph(&input)?;
            let ms: Vec<Matching> = h.perfect_matchings().collect();
            let w = h.matching_enumerator();
            let labels: Vec<Vec<String>> = ms.iter().map(|m| m.edges().iter().map(|&e| h.edge_label(e)).collect()).collect();
            let mut text = format!("matchings {}\n", ms.len());
            for l in &labels {
                writeln!(text, "  {}", l.join(" ")).unwrap();
            }
            writeln!(text, "enumerator {w}").unwrap();
            let mut code = 0;
            let mut status = Value::Null;
            if verify {
                let t = transition_matrix_z(&h, &input_orders(&h)).map_err(Outcome::invalid)?;
                let per = hyper_per_sparse(&t, None);
                if per == w {
                    writeln!(text, "PASS  per(T(H)) = {per}").unwrap();
                    status = json!("PASS");
                } else {
                    writeln!(text, "FAIL  per(T(H)) = {per}").unwrap();
                    status = json!("FAIL");
                    code = 1;
                }
            }
            let v = json!({"count": ms.len(), "matchings": labels, "enumerator": w.to_string(), "status": status});
            Ok(emit(j, v, text, code))
        }
        Command::Gadget { input, out, map } => {
            let (h, m) = read_hypergraph(&input)?;
            let p = need_matching(m)?;
            let g = build_gadget(&h, &p).map_err(Outcome::invalid)?;
            if let Some(path) = out {
                write(&path, &io::to_pretty(&HypergraphFile::from_hypergraph(&g.h, Some(&g.p), None)))?;
            }
            if let Some(path) = map {
                write(&path, &io::to_pretty(&gadget_map_json(&g)))?;
            }
            let text = format!(
                "H' has 4 parts of size {}, {} edges; P' has {} edges\n",
                g.h.part_size(0),
                g.h.edges().len(),
                g.p.len()
            );
            let v = json!({"part_size": g.h.part_size(0), "edges": g.h.edges().len(), "matching": g.p.len()});
            Ok(emit(j, v, text, 0))
        }
        Command::Sign { input, out } => {
            let (h, m) = read_hypergraph(&input)?;
            let orders = match &m {
                Some(p) => contract(&h, p).map_err(Outcome::invalid)?.orders,
                None => input_orders(&h),
            };
            let t = transition_matrix_z(&h, &orders).map_err(Outcome::invalid)?;
            let (signed, graphs, signings) = kasteleyn_sign(&t).map_err(Outcome::invalid)?;
            let mut pos = vec![0; h.vertex_count()];
            for order in &orders {
                for (i, &v) in order.iter().enumerate() {
                    pos[v] = i;
                }
            }
            let signs: Vec<hyperzeta::Sign> = h
                .edges()
                .iter()
                .map(|e| signed.get(&e.verts.iter().map(|&v| pos[v]).collect::<Vec<_>>()).expect("entry of T").sign)
                .collect();
            if let Some(path) = out {
                write(&path, &io::to_pretty(&HypergraphFile::from_hypergraph(&h, m.as_ref(), Some(&signs))))?;
            }
            let per = hyper_per_sparse(&t, None);
            let det = hyper_det_sparse(&signed, None);
            let axes_ok = graphs.iter().zip(&signings).all(|(g, s)| g.verify_by_enumeration(s));
            let negated = signs.iter().filter(|s| s.is_minus()).count();
            let pass = axes_ok && per == det;
            let text = format!(
                "{}  per = {per}, det = {det}; {} support graphs {}; {negated} entries negated\n",
                if pass { "PASS" } else { "FAIL" },
                graphs.len(),
                if axes_ok { "verified" } else { "NOT verified" },
            );
            let v = json!({
                "status": if pass { "PASS" } else { "FAIL" },
                "per": per.to_string(),
                "det": det.to_string(),
                "support_graphs_verified": axes_ok,
                "negated": negated,
            });
            Ok(emit(j, v, text, if pass { 0 } else { 1 }))
        }
        Command::Contract { input, out, verify } => {
            let (h, m) = read_hypergraph(&input)?;
            let p = need_matching(m)?;
            let c = contract(&h, &p).map_err(Outcome::invalid)?;
            if let Some(path) = out {
                write(&path, &io::to_pretty(&DirectedHypergraphFile::from_hypergraph(&c.d)))?;
            }
            let mut text = format!("D has {} vertices, {} hyperedges\n", c.d.vertex_count(), c.d.len());
            let mut code = 0;
            let mut status = Value::Null;
            if verify {
                let holds = contraction_identity_holds(&h, &p, &c);
                text.push_str(if holds { "PASS  T(H, x) = I + A(D, y)\n" } else { "FAIL  T(H, x) != I + A(D, y)\n" });
                status = json!(if holds { "PASS" } else { "FAIL" });
                code = if holds { 0 } else { 1 };
            }
            let v = json!({"vertices": c.d.vertex_count(), "hyperedges": c.d.len(), "status": status});
            Ok(emit(j, v, text, code))
        }
        Command::Bass2 { input, max_degree, verify } => {
            let d = read::<DigraphFile>(&input)?.to_digraph().map_err(Outcome::invalid)?;
            let product = is2_truncated(&d, max_degree);
            if !verify {
                return Ok(emit(j, json!({"product": product.to_string()}), format!("product = {product}\n"), 0));
            }
            let det = det_identity_minus(&d.to_hypergraph(), max_degree);
            Ok(compare(j, &product, &det, json!({"max_degree": max_degree})))
        }
        Command::Bass4 { input, max_degree, verify, limits } => {
            let d = read::<DirectedHypergraphFile>(&input)?.to_hypergraph().map_err(Outcome::invalid)?;
            let circs = enumerate_circulations(&d, max_degree as usize, limits.enumeration()).map_err(Outcome::invalid)?;
            let product = product_from(&d, &circs, max_degree);
            let extra = json!({"max_degree": max_degree, "circulations": circs.len()});
            if !verify {
                let text = format!("product = {product}\ncirculations {}\n", circs.len());
                return Ok(emit(j, json!({"product": product.to_string(), "details": extra}), text, 0));
            }
            let det = det_identity_minus(&d, max_degree);
            let mut o = compare(j, &product, &det, extra);
            if !j {
                writeln!(o.stdout, "circulations {}", circs.len()).unwrap();
            }
            Ok(o)
        }
        Command::Coin { sizes } => {
            if sizes.is_empty() || sizes.iter().all(|&s| s == 0) {
                return Err(Outcome::invalid("--sizes needs at least one positive multiplicity"));
            }
            let profile: Vec<u32> = sizes.into_iter().filter(|&s| s > 0).collect();
            let total: u32 = profile.iter().sum();
            if total > 12 {
                return Err(Outcome::invalid(format!("{total} coins exceed the enumeration limit of 12")));
            }
            let v = coin_lemma_check(&profile);
            Ok(emit(j, json!({"sizes": profile, "value": v}), format!("{v}\n"), 0))
        }
    }
}

fn gadget_map_json(g: &Gadget) -> Value {
    let name = |v: usize| g.h.vertex_name(v).to_string();
    let label = |e: usize| g.h.edge_label(e);
    json!({
        "edges": g.map.edges.iter().map(|eg| json!({
            "vertices": eg.vertices.iter().map(|&v| name(v)).collect::<Vec<_>>(),
            "m1": eg.m1.iter().map(|&e| label(e)).collect::<Vec<_>>(),
            "m2": eg.m2.iter().map(|&e| label(e)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "vertex_copies": g.map.vertex_copies.iter().map(|c| c.iter().map(|&v| name(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatch_reports_first_difference() {
        let det = TruncatedPolynomial::one().with_cap(4);
        let other = TruncatedPolynomial::one().add(&TruncatedPolynomial::var(0).mul(&TruncatedPolynomial::var(1)).neg()).with_cap(4);
        let o = compare(false, &other, &det, Value::Null);
        assert_eq!(o.code, 1);
        assert_eq!(o.stdout, "FAIL  first difference at x0*x1: product -1, det 0\n");
        let o = compare(false, &det, &det, Value::Null);
        assert_eq!((o.code, o.stdout.as_str()), (0, "PASS  det = 1\n"));
    }
}
