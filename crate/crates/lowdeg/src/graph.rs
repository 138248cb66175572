//! Labeled edge-induced graphs and permutations.
//!
//! A graph here is exactly its edge set: vertices are the endpoints that
//! occur in some edge, so there are never isolated vertices. Labels are
//! arbitrary positive integers and need not be contiguous.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop ({0},{0}) is not a valid edge")]
    SelfLoop(u32),
    #[error("vertex label 0 is not allowed (labels are positive integers)")]
    ZeroLabel,
    #[error("vertex {0} outside permutation domain 1..={1}")]
    OutsideDomain(u32, u32),
    #[error("permutation mapping is not a bijection on 1..={0}")]
    NotBijective(u32),
    #[error("bad edge list line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// An undirected graph identified with its sorted set of edges (u,v), u < v.
///
/// Equality, ordering and hashing are all on the edge set, matching the
/// convention that two graphs are the same iff they have the same edges.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LabeledGraph {
    #[serde(rename = "edges")]
    edges: Vec<(u32, u32)>,
}

impl fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{:?}", self.edges)
    }
}

impl LabeledGraph {
    pub fn empty() -> Self {
        LabeledGraph { edges: Vec::new() }
    }

    /// Builds a graph from unordered pairs; orientation and duplicates are
    /// normalized away. Self-loops and label 0 are rejected.
    pub fn from_edges<I: IntoIterator<Item = (u32, u32)>>(iter: I) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for (u, v) in iter {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if u == 0 || v == 0 {
                return Err(GraphError::ZeroLabel);
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(LabeledGraph { edges })
    }

    /// Internal constructor for edges already normalized (each u < v),
    /// possibly unsorted or duplicated.
    pub(crate) fn from_normalized(mut edges: Vec<(u32, u32)>) -> Self {
        debug_assert!(edges.iter().all(|&(u, v)| u < v && u > 0));
        edges.sort_unstable();
        edges.dedup();
        LabeledGraph { edges }
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertex_set(&self) -> BTreeSet<u32> {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_set().len()
    }

    pub fn contains_edge(&self, u: u32, v: u32) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.binary_search(&e).is_ok()
    }

    /// Edge containment: every edge of self is an edge of other.
    pub fn is_subgraph_of(&self, other: &LabeledGraph) -> bool {
        // both sorted: single merge pass
        let mut it = other.edges.iter();
        'outer: for e in &self.edges {
            for f in it.by_ref() {
                if f == e {
                    continue 'outer;
                }
                if f > e {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &LabeledGraph) -> LabeledGraph {
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        edges.extend_from_slice(&self.edges);
        edges.extend_from_slice(&other.edges);
        LabeledGraph::from_normalized(edges)
    }

    pub fn intersection(&self, other: &LabeledGraph) -> LabeledGraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| other.edges.binary_search(e).is_ok())
            .copied()
            .collect();
        LabeledGraph { edges }
    }

    /// Edge-set difference: the edges of self that are not in other.
    pub fn difference(&self, other: &LabeledGraph) -> LabeledGraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| other.edges.binary_search(e).is_err())
            .copied()
            .collect();
        LabeledGraph { edges }
    }

    pub fn symmetric_difference(&self, other: &LabeledGraph) -> LabeledGraph {
        self.difference(other).union(&other.difference(self))
    }

    /// Applies a vertex permutation to every edge. Every vertex of the graph
    /// must lie in the permutation's domain.
    pub fn relabel(&self, pi: &Permutation) -> Result<LabeledGraph, GraphError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for &(u, v) in &self.edges {
            let (a, b) = (pi.apply(u)?, pi.apply(v)?);
            edges.push((a.min(b), a.max(b)));
        }
        Ok(LabeledGraph::from_normalized(edges))
    }

    /// Edge-induced subgraph on a vertex subset: all edges with both
    /// endpoints in `verts`.
    pub fn induced(&self, verts: &BTreeSet<u32>) -> LabeledGraph {
        let edges = self
            .edges
            .iter()
            .filter(|(u, v)| verts.contains(u) && verts.contains(v))
            .copied()
            .collect();
        LabeledGraph { edges }
    }

    /// All connected components, each as its own edge-induced graph,
    /// in deterministic order (by smallest edge).
    pub fn components(&self) -> Vec<LabeledGraph> {
        let verts: Vec<u32> = self.vertex_set().into_iter().collect();
        let index: std::collections::HashMap<u32, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut dsu: Vec<usize> = (0..verts.len()).collect();
        fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
            if dsu[x] != x {
                let r = find(dsu, dsu[x]);
                dsu[x] = r;
            }
            dsu[x]
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut dsu, index[&u]), find(&mut dsu, index[&v]));
            dsu[ru] = rv;
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<(u32, u32)>> = Default::default();
        for &(u, v) in &self.edges {
            let r = find(&mut dsu, index[&u]);
            groups.entry(r).or_default().push((u, v));
        }
        let mut comps: Vec<LabeledGraph> = groups
            .into_values()
            .map(LabeledGraph::from_normalized)
            .collect();
        comps.sort();
        comps
    }

    pub fn is_connected(&self) -> bool {
        !self.is_empty() && self.components().len() == 1
    }
}

/// A bijection on {1..n}, stored as the image vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: u32) -> Self {
        Permutation {
            image: (1..=n).collect(),
        }
    }

    /// Builds from the image vector: image[i] = pi(i+1).
    pub fn from_image(image: Vec<u32>) -> Result<Self, GraphError> {
        let n = image.len() as u32;
        let mut seen = vec![false; image.len()];
        for &v in &image {
            if v == 0 || v > n || seen[(v - 1) as usize] {
                return Err(GraphError::NotBijective(n));
            }
            seen[(v - 1) as usize] = true;
        }
        Ok(Permutation { image })
    }

    pub fn n(&self) -> u32 {
        self.image.len() as u32
    }

    pub fn apply(&self, v: u32) -> Result<u32, GraphError> {
        if v == 0 || v as usize > self.image.len() {
            return Err(GraphError::OutsideDomain(v, self.n()));
        }
        Ok(self.image[(v - 1) as usize])
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0u32; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            image[(v - 1) as usize] = (i + 1) as u32;
        }
        Permutation { image }
    }

    /// Composition acting left-to-right on points: (self.compose(g))(v) = self(g(v)).
    pub fn compose(&self, g: &Permutation) -> Permutation {
        assert_eq!(self.n(), g.n(), "composition requires equal domains");
        let image = g.image.iter().map(|&v| self.image[(v - 1) as usize]).collect();
        Permutation { image }
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }
}

/// Parses the one-edge-per-line text format: "u v", '#' starts a comment,
/// blank lines ignored.
pub fn parse_edge_list(text: &str) -> Result<LabeledGraph, GraphError> {
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |s: Option<&str>| -> Result<u32, GraphError> {
            s.and_then(|t| t.parse().ok()).ok_or(GraphError::Parse {
                line: lineno + 1,
                reason: format!("expected two positive integers, got {raw:?}"),
            })
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(GraphError::Parse {
                line: lineno + 1,
                reason: format!("trailing tokens in {raw:?}"),
            });
        }
        edges.push((u, v));
    }
    LabeledGraph::from_edges(edges)
}

/// Canonical writer: sorted edges, one per line.
pub fn format_edge_list(g: &LabeledGraph) -> String {
    let mut out = String::new();
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
