//! The public API from JSON text to the truncated product.

use hyperzeta::circulations::{enumerate_aperiodic_walks, enumerate_circulations, is4_truncated, Digraph, EnumerationLimits};
use hyperzeta::codes::{kernel_basis, weight_enumerator, Code};
use hyperzeta::gadget::{build_gadget, contract, contraction_identity_holds, normalize_to_identity};
use hyperzeta::hyperalg::{adjacency_matrix_z, det_identity_minus, hyper_det_sparse, transition_matrix_z};
use hyperzeta::io::{parse, to_pretty, CodeFile, DirectedHypergraphFile, HypergraphFile};
use hyperzeta::kasteleyn::kasteleyn_sign;

const FIXTURE_B: &str = r#"{
  "k": 3,
  "parts": [["a1","a2","a3"],["b1","b2","b3"],["c1","c2","c3"]],
  "edges": [
    {"verts":["a1","b1","c1"],"weight":0,"name":"p1"},
    {"verts":["a2","b2","c2"],"weight":0,"name":"p2"},
    {"verts":["a3","b3","c3"],"weight":0,"name":"p3"},
    {"verts":["a1","b2","c3"],"weight":1,"name":"e4"},
    {"verts":["a2","b3","c1"],"weight":1,"name":"e5"},
    {"verts":["a3","b1","c2"],"weight":0,"name":"e6"}
  ],
  "matching": [0,1,2]
}"#;

#[test]
fn matching_enumerator_survives_the_whole_chain() {
    let (h, p) = parse::<HypergraphFile>(FIXTURE_B).unwrap().to_hypergraph().unwrap();
    let p = p.unwrap();
    let w = h.matching_enumerator();
    assert_eq!(w.to_string(), "1 + z^2");
    // the enumerator is the weight enumerator of the kernel of the incidence matrix
    let kernel = Code::new(h.edges().len(), kernel_basis(&h.incidence_matrix()), h.edge_weights()).unwrap();
    assert_eq!(weight_enumerator(&kernel).unwrap(), w);

    let g = build_gadget(&h, &p).unwrap();
    let c = contract(&g.h, &g.p).unwrap();
    assert!(contraction_identity_holds(&g.h, &g.p, &c));
    let t = transition_matrix_z(&g.h, &c.orders).unwrap();
    let (signed, _, _) = kasteleyn_sign(&t).unwrap();
    let (a2, flips) = normalize_to_identity(&signed, c.d.vertices().to_vec()).unwrap();
    let det = hyper_det_sparse(&adjacency_matrix_z(&a2).plus_identity(), None);
    assert_eq!(det, if flips.len() % 2 == 1 { w.neg() } else { w });

    // the normalized hypergraph goes through its file format unchanged
    let text = to_pretty(&DirectedHypergraphFile::from_hypergraph(&a2));
    let back = parse::<DirectedHypergraphFile>(&text).unwrap().to_hypergraph().unwrap();
    assert_eq!(back, a2);
    let d2 = back.negated();
    assert_eq!(is4_truncated(&d2, 3, EnumerationLimits::default()).unwrap(), det_identity_minus(&d2, 3));
}

#[test]
fn code_file_with_weights() {
    let f: CodeFile = parse(r#"{"n":4,"basis":[[1,1,0,0],[0,0,1,1]],"weights":["1/2","1/2",1,"2"]}"#).unwrap();
    assert_eq!(weight_enumerator(&f.to_code().unwrap()).unwrap().to_string(), "1 + z + z^3 + z^4");
}

#[test]
fn circulations_of_a_digraph_are_its_aperiodic_walks() {
    let d = Digraph::new(4, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 2), (1, 0)]).unwrap();
    let walks = enumerate_aperiodic_walks(&d, 6);
    let circs = enumerate_circulations(&d.to_hypergraph(), 6, EnumerationLimits::default()).unwrap();
    assert_eq!(walks.len(), circs.len());
    let mut a: Vec<String> = walks.iter().map(|w| w.monomial().to_string()).collect();
    let mut b: Vec<String> = circs.iter().map(|c| c.monomial().to_string()).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}
