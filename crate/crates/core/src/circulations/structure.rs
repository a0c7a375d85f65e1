//! Hyperedge instances, connectors and circulations as plain data, plus the
//! bookkeeping that every check needs: connector lookups, connector cycles,
//! copy relabelings and canonical forms.

use std::collections::BTreeMap;
use std::fmt;

use crate::hypergraph::DirectedHypergraph;
use crate::poly::{Monomial, VarId};

/// Copy `copy` of hyperedge `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instance {
    pub edge: usize,
    pub copy: u32,
}

impl Instance {
    pub fn new(edge: usize, copy: u32) -> Self {
        Instance { edge, copy }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}.{}", self.edge, self.copy)
    }
}

/// A connector at `vertex`: `members[i]` is the instance whose `i`-th
/// vertex is `vertex`. The last position is the blue one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Connector {
    pub vertex: usize,
    pub members: Vec<Instance>,
}

impl Connector {
    pub fn new(vertex: usize, members: Vec<Instance>) -> Self {
        Connector { vertex, members }
    }

    pub fn blue(&self) -> Instance {
        *self.members.last().expect("nonempty connector")
    }
}

impl fmt::Display for Connector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for m in &self.members {
            write!(f, "{m}, ")?;
        }
        write!(f, "v{})", self.vertex)
    }
}

/// A multiset of hyperedge instances with a set of connectors. Instances of
/// hyperedge `e` are copies `0..mult(e)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Circulation {
    arity: usize,
    /// `(edge, multiplicity)`, sorted by edge, multiplicities positive.
    mult: Vec<(usize, u32)>,
    /// Sorted.
    connectors: Vec<Connector>,
}

impl Circulation {
    pub fn new(arity: usize, mult: impl IntoIterator<Item = (usize, u32)>, mut connectors: Vec<Connector>) -> Self {
        let mut m: BTreeMap<usize, u32> = BTreeMap::new();
        for (e, k) in mult {
            *m.entry(e).or_insert(0) += k;
        }
        connectors.sort();
        Circulation { arity, mult: m.into_iter().filter(|&(_, k)| k > 0).collect(), connectors }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn multiplicities(&self) -> &[(usize, u32)] {
        &self.mult
    }

    pub fn connectors(&self) -> &[Connector] {
        &self.connectors
    }

    /// `|S|`, counted with multiplicity.
    pub fn size(&self) -> usize {
        self.mult.iter().map(|&(_, k)| k as usize).sum()
    }

    pub fn instances(&self) -> Vec<Instance> {
        self.mult.iter().flat_map(|&(e, k)| (0..k).map(move |c| Instance::new(e, c))).collect()
    }

    /// Product of the hyperedge variables, one factor per instance.
    pub fn monomial(&self) -> Monomial {
        Monomial::from_pairs(self.mult.iter().map(|&(e, k)| (e as VarId, k)))
    }

    pub fn multiplicity(&self, edge: usize) -> u32 {
        self.mult.binary_search_by_key(&edge, |&(e, _)| e).map(|i| self.mult[i].1).unwrap_or(0)
    }

    /// Dense index of an instance, if it belongs to `S`.
    pub fn index_of(&self, h: Instance) -> Option<usize> {
        let mut offset = 0;
        for &(e, k) in &self.mult {
            if e == h.edge {
                return (h.copy < k).then_some(offset + h.copy as usize);
            }
            offset += k as usize;
        }
        None
    }

    /// Vertices that carry at least one connector, sorted, with counts.
    pub fn connector_counts(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for c in &self.connectors {
            *out.entry(c.vertex).or_insert(0) += 1;
        }
        out
    }

    pub fn connectors_at(&self, v: usize) -> impl Iterator<Item = (usize, &Connector)> {
        self.connectors.iter().enumerate().filter(move |(_, c)| c.vertex == v)
    }

    /// Applies a copy relabeling: `perm[e][c]` is the new copy of `(e, c)`.
    pub fn relabel(&self, perm: &BTreeMap<usize, Vec<u32>>) -> Circulation {
        let map = |h: Instance| match perm.get(&h.edge) {
            Some(p) => Instance::new(h.edge, p[h.copy as usize]),
            None => h,
        };
        let mut connectors: Vec<Connector> = self
            .connectors
            .iter()
            .map(|c| Connector::new(c.vertex, c.members.iter().map(|&h| map(h)).collect()))
            .collect();
        connectors.sort();
        Circulation { arity: self.arity, mult: self.mult.clone(), connectors }
    }

    fn relabelings(&self) -> Relabelings {
        Relabelings::new(&self.mult)
    }

    /// Least relabeling in the derived order.
    pub fn canonical(&self) -> Circulation {
        let mut best: Option<Circulation> = None;
        for perm in self.relabelings() {
            let r = self.relabel(&perm);
            if best.as_ref().is_none_or(|b| r.connectors < b.connectors) {
                best = Some(r);
            }
        }
        best.unwrap_or_else(|| self.clone())
    }

    /// Number of copy relabelings mapping the connector set to itself.
    pub fn automorphism_count(&self) -> usize {
        self.relabelings().filter(|p| self.relabel(p).connectors == self.connectors).count()
    }

    /// Periodic iff some nontrivial copy relabeling preserves the connectors.
    pub fn is_periodic(&self) -> bool {
        self.relabelings()
            .filter(|p| p.values().any(|v| v.iter().enumerate().any(|(i, &c)| c as usize != i)))
            .any(|p| self.relabel(&p).connectors == self.connectors)
    }

    /// Lookup tables over dense instance indices.
    pub fn index(&self) -> Result<CirculationIndex, String> {
        CirculationIndex::build(self)
    }

    /// Number of connector cycles summed over the non-blue colors.
    pub fn m(&self) -> usize {
        let idx = self.index().expect("well-formed circulation");
        (0..self.arity - 1).map(|color| idx.connector_cycles(self, color).len()).sum()
    }
}

impl fmt::Display for Circulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S = {{")?;
        for (i, (e, k)) in self.mult.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if *k == 1 {
                write!(f, "h{e}")?;
            } else {
                write!(f, "h{e}^{k}")?;
            }
        }
        write!(f, "}}; C = {{")?;
        for (i, c) in self.connectors.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// All products of per-edge copy permutations.
struct Relabelings {
    edges: Vec<usize>,
    perms: Vec<Vec<Vec<u32>>>,
    odometer: Vec<usize>,
    done: bool,
}

impl Relabelings {
    fn new(mult: &[(usize, u32)]) -> Self {
        let relevant: Vec<&(usize, u32)> = mult.iter().filter(|&&(_, k)| k > 1).collect();
        Relabelings {
            edges: relevant.iter().map(|&&(e, _)| e).collect(),
            perms: relevant.iter().map(|&&(_, k)| permutations(k)).collect(),
            odometer: vec![0; relevant.len()],
            done: false,
        }
    }
}

impl Iterator for Relabelings {
    type Item = BTreeMap<usize, Vec<u32>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self
            .edges
            .iter()
            .zip(&self.perms)
            .zip(&self.odometer)
            .map(|((&e, ps), &i)| (e, ps[i].clone()))
            .collect();
        let mut j = 0;
        loop {
            if j == self.odometer.len() {
                self.done = true;
                break;
            }
            self.odometer[j] += 1;
            if self.odometer[j] < self.perms[j].len() {
                break;
            }
            self.odometer[j] = 0;
            j += 1;
        }
        Some(item)
    }
}

pub(crate) fn permutations(k: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, used: &mut Vec<bool>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v as u32);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k as usize], &mut out);
    out
}

/// A connector cycle: connector indices in cycle order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectorCycle {
    pub color: usize,
    pub connectors: Vec<usize>,
}

impl ConnectorCycle {
    /// `(-1)^{|z|/2 - 1}` where `|z|` counts both arc kinds.
    pub fn sign_is_minus(&self) -> bool {
        self.connectors.len().is_multiple_of(2)
    }
}

/// For each dense instance index, the connector holding it in each role.
#[derive(Clone, Debug)]
pub struct CirculationIndex {
    pub instances: Vec<Instance>,
    /// `holder[h][role]`.
    pub holder: Vec<Vec<usize>>,
}

impl CirculationIndex {
    fn build(c: &Circulation) -> Result<Self, String> {
        let instances = c.instances();
        let r = c.arity;
        let mut holder = vec![vec![usize::MAX; r]; instances.len()];
        for (ci, conn) in c.connectors.iter().enumerate() {
            if conn.members.len() != r {
                return Err(format!("connector {conn} has {} members", conn.members.len()));
            }
            for (role, &h) in conn.members.iter().enumerate() {
                let hi = c.index_of(h).ok_or_else(|| format!("connector {conn} uses {h} outside S"))?;
                if holder[hi][role] != usize::MAX {
                    return Err(format!("{h} is in two connectors in role {role}"));
                }
                holder[hi][role] = ci;
            }
        }
        for (hi, roles) in holder.iter().enumerate() {
            if let Some(role) = roles.iter().position(|&x| x == usize::MAX) {
                return Err(format!("{} has no connector in role {role}", instances[hi]));
            }
        }
        Ok(CirculationIndex { instances, holder })
    }

    /// Blue instance of the connector holding instance `h` in role `color`.
    pub fn successor(&self, c: &Circulation, color: usize) -> Vec<usize> {
        self.holder
            .iter()
            .map(|roles| c.index_of(c.connectors[roles[color]].blue()).unwrap())
            .collect()
    }

    /// Cycles alternating blue arcs and arcs of `color`.
    pub fn connector_cycles(&self, c: &Circulation, color: usize) -> Vec<ConnectorCycle> {
        let k = c.connectors.len();
        let next = |ci: usize| {
            let b = c.index_of(c.connectors[ci].blue()).unwrap();
            self.holder[b][color]
        };
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = next(x);
            }
            out.push(ConnectorCycle { color, connectors: cyc });
        }
        out
    }

    /// Instance indices grouped into classes linked by shared connectors.
    pub fn connector_components(&self, c: &Circulation) -> Vec<Vec<usize>> {
        let n = self.instances.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for conn in &c.connectors {
            let first = c.index_of(conn.members[0]).unwrap();
            for &h in &conn.members[1..] {
                let a = find(&mut parent, first);
                let b = find(&mut parent, c.index_of(h).unwrap());
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..n {
            let r = find(&mut parent, x);
            groups.entry(r).or_default().push(x);
        }
        groups.into_values().collect()
    }
}

/// Checks conditions (1), (2), (3) and the connector-connectivity reading of
/// (5) against `d`.
pub fn check_structure(d: &DirectedHypergraph, c: &Circulation) -> Result<CirculationIndex, String> {
    if c.arity != d.arity() {
        return Err(format!("arity {} does not match {}", c.arity, d.arity()));
    }
    if c.mult.is_empty() {
        return Err("empty S".into());
    }
    if let Some(&(e, _)) = c.mult.iter().find(|&&(e, _)| e >= d.len()) {
        return Err(format!("unknown hyperedge {e}"));
    }
    for conn in &c.connectors {
        for (role, h) in conn.members.iter().enumerate() {
            if d.hyperedges()[h.edge].verts[role] != conn.vertex {
                return Err(format!("{h} does not have vertex {} in position {role}", conn.vertex));
            }
        }
    }
    let idx = c.index()?;
    // (3): arcs of S connect through shared vertices.
    let edges: Vec<usize> = c.mult.iter().map(|&(e, _)| e).collect();
    let mut reached = vec![false; edges.len()];
    reached[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..edges.len() {
            if reached[i] {
                continue;
            }
            let vi = &d.hyperedges()[edges[i]].verts;
            if (0..edges.len()).any(|j| reached[j] && d.hyperedges()[edges[j]].verts.iter().any(|v| vi.contains(v))) {
                reached[i] = true;
                changed = true;
            }
        }
    }
    if reached.iter().any(|r| !r) {
        return Err("O(S) is not weakly connected".into());
    }
    if idx.connector_components(c).len() != 1 {
        return Err("splits into connector-closed parts".into());
    }
    Ok(idx)
}
