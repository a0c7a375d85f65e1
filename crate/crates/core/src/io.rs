//! JSON file formats for codes, graphs, digraphs and hypergraphs.
//!
//! Weights are written as strings (`"3/2"`); integers are accepted too.

use num_rational::BigRational;
use num_traits::Zero;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circulations::walks::Digraph;
use crate::codes::{Code, F2Vector, Graph};
use crate::hypergraph::{DirectedHypergraph, KPartiteHypergraph, Matching};
use crate::poly::{format_rational, parse_rational};
use crate::Sign;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl ToString) -> FormatError {
    FormatError::Invalid(msg.to_string())
}

/// A rational weight written as a string or an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub struct Weight(pub BigRational);

impl From<Weight> for String {
    fn from(w: Weight) -> String {
        format_rational(&w.0)
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight(BigRational::zero())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => parse_rational(&s).map(Weight).ok_or_else(|| de::Error::custom(format!("bad rational {s:?}"))),
            Raw::Int(i) => Ok(Weight(BigRational::from_integer(i.into()))),
        }
    }
}

/// `{"n":3,"basis":[[1,1,0],[0,1,1]],"weights":["1","1","1"]}`; weights
/// default to 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub basis: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Weight>>,
}

impl CodeFile {
    pub fn to_code(&self) -> Result<Code, FormatError> {
        if let Some(bad) = self.basis.iter().flatten().find(|&&b| b > 1) {
            return Err(invalid(format!("basis entry {bad} is not a bit")));
        }
        let basis = self.basis.iter().map(|row| F2Vector::from_bits(row)).collect();
        let weights = match &self.weights {
            Some(w) => w.iter().map(|x| x.0.clone()).collect(),
            None => crate::codes::unit_weights(self.n),
        };
        Code::new(self.n, basis, weights).map_err(invalid)
    }
}

/// `{"vertices":["u","v"],"edges":[["u","v"]],"weights":["1"]}`; weights
/// default to 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Weight>>,
}

fn lookup(names: &[String], name: &str) -> Result<usize, FormatError> {
    names.iter().position(|v| v == name).ok_or_else(|| invalid(format!("unknown vertex {name:?}")))
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<(Graph, Vec<BigRational>), FormatError> {
        let edges = self
            .edges
            .iter()
            .map(|[u, v]| Ok((lookup(&self.vertices, u)?, lookup(&self.vertices, v)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        let g = Graph::new(self.vertices.clone(), edges).map_err(invalid)?;
        let weights = match &self.weights {
            Some(w) if w.len() != self.edges.len() => {
                return Err(invalid(format!("expected {} weights, got {}", self.edges.len(), w.len())))
            }
            Some(w) => w.iter().map(|x| x.0.clone()).collect(),
            None => crate::codes::unit_weights(self.edges.len()),
        };
        Ok((g, weights))
    }
}

/// `{"vertices":["u","v"],"arcs":[["u","v"],["v","u"]]}`; arc `i` carries `x_i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DigraphFile {
    pub vertices: Vec<String>,
    pub arcs: Vec<[String; 2]>,
}

impl DigraphFile {
    pub fn to_digraph(&self) -> Result<Digraph, FormatError> {
        let arcs = self
            .arcs
            .iter()
            .map(|[u, v]| Ok((lookup(&self.vertices, u)?, lookup(&self.vertices, v)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        Digraph::new(self.vertices.len(), arcs).map_err(invalid)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub verts: Vec<String>,
    #[serde(default)]
    pub weight: Weight,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
}

/// `{"k":3,"parts":[["a1"],["b1"],["c1"]],"edges":[{"verts":["a1","b1","c1"],"weight":"0"}],"matching":[0]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypergraphFile {
    pub k: usize,
    pub parts: Vec<Vec<String>>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matching: Option<Vec<usize>>,
}

impl HypergraphFile {
    pub fn to_hypergraph(&self) -> Result<(KPartiteHypergraph, Option<Matching>), FormatError> {
        if self.k != self.parts.len() {
            return Err(invalid(format!("k = {} but {} parts given", self.k, self.parts.len())));
        }
        let mut h = KPartiteHypergraph::new(self.parts.clone()).map_err(invalid)?;
        for (i, e) in self.edges.iter().enumerate() {
            let ids = e
                .verts
                .iter()
                .map(|n| h.vertex_id(n).ok_or_else(|| invalid(format!("edge {i}: unknown vertex {n:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            h.add_edge(&ids, e.weight.0.clone(), e.name.clone()).map_err(invalid)?;
        }
        let m = match &self.matching {
            Some(m) => {
                if let Some(&bad) = m.iter().find(|&&e| e >= self.edges.len()) {
                    return Err(invalid(format!("matching uses unknown edge {bad}")));
                }
                Some(Matching::new(m.clone()))
            }
            None => None,
        };
        Ok((h, m))
    }

    pub fn from_hypergraph(h: &KPartiteHypergraph, matching: Option<&Matching>, signs: Option<&[Sign]>) -> Self {
        let edges = h
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeEntry {
                verts: e.verts.iter().map(|&v| h.vertex_name(v).to_string()).collect(),
                weight: Weight(e.weight.clone()),
                name: e.name.clone(),
                sign: signs.map(|s| s[i]),
            })
            .collect();
        HypergraphFile {
            k: h.k(),
            parts: h.parts().to_vec(),
            edges,
            matching: matching.map(|m| m.edges().to_vec()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperedgeEntry {
    pub verts: Vec<String>,
    #[serde(default)]
    pub weight: Weight,
    #[serde(default = "plus")]
    pub sign: Sign,
}

fn plus() -> Sign {
    Sign::Plus
}

/// `{"arity":4,"vertices":["1","2","3","4"],"hyperedges":[{"verts":["1","2","3","4"],"weight":"0","sign":"+"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectedHypergraphFile {
    pub arity: usize,
    pub vertices: Vec<String>,
    pub hyperedges: Vec<HyperedgeEntry>,
}

impl DirectedHypergraphFile {
    pub fn to_hypergraph(&self) -> Result<DirectedHypergraph, FormatError> {
        let mut d = DirectedHypergraph::new(self.arity, self.vertices.clone()).map_err(invalid)?;
        for h in &self.hyperedges {
            let ids = h.verts.iter().map(|n| lookup(&self.vertices, n)).collect::<Result<Vec<_>, _>>()?;
            d.push(ids, h.weight.0.clone(), h.sign).map_err(invalid)?;
        }
        Ok(d)
    }

    pub fn from_hypergraph(d: &DirectedHypergraph) -> Self {
        DirectedHypergraphFile {
            arity: d.arity(),
            vertices: d.vertices().to_vec(),
            hyperedges: d
                .hyperedges()
                .iter()
                .map(|h| HyperedgeEntry {
                    verts: h.verts.iter().map(|&v| d.vertices()[v].clone()).collect(),
                    weight: Weight(h.weight.clone()),
                    sign: h.sign,
                })
                .collect(),
        }
    }
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
