//! Finite simple undirected graphs with named vertices.
//!
//! Vertices are identified by their declaration index. Everything that has to
//! "pick" a vertex or a pair picks the least one in declaration order, so all
//! results are deterministic.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported vertex count; vertex sets are 64-bit masks.
pub const MAX_VERTICES: usize = 64;

/// A set of vertices of one graph, stored as a bit mask over declaration indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    /// The set `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1u64 << v)
    }

    pub fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1u64 << v))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: VertexSet) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(v)
            }
        })
    }

    /// All subsets of this set, in increasing bit-mask order.
    pub fn subsets(self) -> impl Iterator<Item = VertexSet> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(VertexSet(cur))
        })
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A natural number or infinity. `Finite(_) < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dist {
    Finite(usize),
    Infinite,
}

impl Dist {
    pub fn finite(self) -> Option<usize> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Infinite => None,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Infinite => f.write_str("inf"),
        }
    }
}

/// An unordered pair of distinct vertices, stored with `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DominatingPair {
    pub first: usize,
    pub second: usize,
}

/// A finite simple undirected graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    adjacency: Vec<VertexSet>,
}

impl Graph {
    /// Builds a graph from vertex names and index pairs.
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        if names.len() > MAX_VERTICES {
            return Err(Error::input(format!(
                "{} vertices given, at most {MAX_VERTICES} are supported",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty()
                || !name.is_ascii()
                || name.chars().any(|c| c.is_whitespace() || c == ':' || c == ',' || c == ';')
            {
                return Err(Error::input(format!("invalid vertex name {name:?}")));
            }
            if names[..i].contains(name) {
                return Err(Error::input(format!("duplicate vertex `{name}`")));
            }
        }
        let n = names.len();
        let mut adjacency = vec![VertexSet::EMPTY; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!("edge ({u}, {v}) references a missing vertex")));
            }
            if u == v {
                return Err(Error::input(format!("loop edge at `{}`", names[u])));
            }
            if adjacency[u].contains(v) {
                return Err(Error::input(format!(
                    "duplicate edge ({}, {})",
                    names[u], names[v]
                )));
            }
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
        Ok(Graph { names, adjacency })
    }

    /// Convenience constructor from string names.
    pub fn from_names(names: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let lookup = |s: &str| {
            owned
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownVertex(s.to_string()))
        };
        let idx = edges
            .iter()
            .map(|&(u, v)| Ok((lookup(u)?, lookup(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Graph::new(owned, &idx)
    }

    /// Builds a graph on `n` vertices named `v0, v1, ...` from an adjacency bit mask
    /// over the pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn from_edge_mask(n: usize, mask: u64) -> Self {
        let names = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> bit & 1 == 1 {
                    edges.push((i, j));
                }
                bit += 1;
            }
        }
        Graph::new(names, &edges).expect("generated graph is simple")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    /// Parses a comma-separated list of vertex names; the empty string is the empty set.
    pub fn parse_set(&self, text: &str) -> Result<VertexSet> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.vertex(s))
            .collect()
    }

    pub fn set_names(&self, set: VertexSet) -> Vec<String> {
        set.iter().map(|v| self.names[v].clone()).collect()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            for v in self.adjacency[u].iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{v}")))
        }
    }

    fn check_set(&self, set: VertexSet) -> Result<()> {
        if set.is_subset(self.vertices()) {
            Ok(())
        } else {
            Err(Error::input("vertex set is not contained in the graph"))
        }
    }

    /// The link (neighbourhood) of `v`.
    pub fn link(&self, v: usize) -> Result<VertexSet> {
        self.check(v)?;
        Ok(self.adjacency[v])
    }

    /// Link of `v` together with `v` itself.
    pub fn star(&self, v: usize) -> Result<VertexSet> {
        Ok(self.link(v)?.with(v))
    }

    /// A read-only view of the subgraph induced on `set`, sharing vertex indices
    /// with `self`.
    pub fn view(&self, set: VertexSet) -> Result<Subgraph<'_>> {
        self.check_set(set)?;
        Ok(Subgraph { graph: self, set })
    }

    pub fn whole(&self) -> Subgraph<'_> {
        Subgraph { graph: self, set: self.vertices() }
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<Dist> {
        self.whole().distance(u, v)
    }

    pub fn radius(&self) -> Result<Dist> {
        self.whole().radius()
    }

    pub fn centers(&self) -> Vec<usize> {
        self.whole().centers()
    }

    pub fn dominating_pairs(&self) -> Vec<DominatingPair> {
        self.whole().dominating_pairs()
    }

    /// The induced subgraph on `set` as a standalone graph, keeping names and
    /// declaration order.
    pub fn induced(&self, set: VertexSet) -> Result<Graph> {
        self.check_set(set)?;
        let kept: Vec<usize> = set.iter().collect();
        let names = kept.iter().map(|&v| self.names[v].clone()).collect();
        let mut edges = Vec::new();
        for (i, &u) in kept.iter().enumerate() {
            for (j, &v) in kept.iter().enumerate().skip(i + 1) {
                if self.adjacent(u, v) {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(names, &edges)
    }

    pub fn complement(&self) -> Graph {
        let full = self.vertices();
        Graph {
            names: self.names.clone(),
            adjacency: (0..self.len())
                .map(|v| full.difference(self.adjacency[v]).without(v))
                .collect(),
        }
    }

    /// A graph is irreducible when its complement is connected.
    pub fn is_irreducible(&self) -> bool {
        self.complement().whole().is_connected()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(u, v)| format!("{}-{}", self.names[u], self.names[v]))
            .collect();
        f.debug_struct("Graph")
            .field("vertices", &self.names)
            .field("edges", &edges)
            .finish()
    }
}

/// The subgraph of `graph` induced on `set`.
#[derive(Clone, Copy)]
pub struct Subgraph<'g> {
    graph: &'g Graph,
    set: VertexSet,
}

impl<'g> Subgraph<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn vertices(&self) -> VertexSet {
        self.set
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    fn neighbours(&self, v: usize) -> VertexSet {
        self.graph.adjacency[v].intersection(self.set)
    }

    fn member(&self, v: usize) -> Result<()> {
        if self.set.contains(v) {
            Ok(())
        } else if v < self.graph.len() {
            Err(Error::input(format!(
                "vertex `{}` is outside the subgraph",
                self.graph.names[v]
            )))
        } else {
            Err(Error::UnknownVertex(format!("#{v}")))
        }
    }

    /// BFS distances from `source`; `None` for unreachable vertices.
    fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.graph.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for w in self.neighbours(u).iter() {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<Dist> {
        self.member(u)?;
        self.member(v)?;
        Ok(match self.distances_from(u)[v] {
            Some(d) => Dist::Finite(d),
            None => Dist::Infinite,
        })
    }

    pub fn eccentricity(&self, v: usize) -> Result<Dist> {
        self.member(v)?;
        let dist = self.distances_from(v);
        Ok(self
            .set
            .iter()
            .map(|w| dist[w].map_or(Dist::Infinite, Dist::Finite))
            .max()
            .unwrap_or(Dist::Finite(0)))
    }

    /// Minimum eccentricity; infinite iff the subgraph is disconnected.
    pub fn radius(&self) -> Result<Dist> {
        if self.set.is_empty() {
            return Err(Error::input("radius of the empty graph is undefined"));
        }
        self.set
            .iter()
            .map(|v| self.eccentricity(v))
            .try_fold(Dist::Infinite, |best, e| Ok(best.min(e?)))
    }

    pub fn is_connected(&self) -> bool {
        match self.set.first() {
            None => true,
            Some(v) => {
                let dist = self.distances_from(v);
                self.set.iter().all(|w| dist[w].is_some())
            }
        }
    }

    /// Vertices adjacent to every other vertex of the subgraph, in order.
    pub fn centers(&self) -> Vec<usize> {
        self.set
            .iter()
            .filter(|&v| self.set.without(v).is_subset(self.graph.adjacency[v]))
            .collect()
    }

    /// All pairs `{v1, v2}` such that every other vertex is adjacent to both,
    /// sorted lexicographically.
    pub fn dominating_pairs(&self) -> Vec<DominatingPair> {
        let members: Vec<usize> = self.set.iter().collect();
        let mut out = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let rest = self.set.without(a).without(b);
                if rest.is_subset(self.graph.adjacency[a]) && rest.is_subset(self.graph.adjacency[b]) {
                    out.push(DominatingPair { first: a, second: b });
                }
            }
        }
        out
    }
}
