//! Simple undirected graphs on `0..n`, bipartitions, and spanning pieces.
//!
//! Edges are always stored in normalized `(min, max)` form and adjacency
//! lists are kept sorted, so membership tests are binary searches and
//! neighborhood scans are linear.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

/// Normalized undirected edge, `0 <= u < v < n`.
pub type Edge = (Vertex, Vertex);

#[inline]
pub fn edge(u: Vertex, v: Vertex) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("bipartition sides overlap at vertex {0}")]
    OverlappingSides(Vertex),
    #[error("edge ({0}, {1}) is not present in the host graph")]
    MissingEdge(Vertex, Vertex),
    #[error("edge ({0}, {1}) does not cross the bipartition")]
    NonCrossingEdge(Vertex, Vertex),
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.m)
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph, rejecting loops, duplicates and out-of-range labels.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
            m += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = edge(u, w[0]);
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Graph { n, adj, m })
    }

    /// Builds a graph from edges already known to be valid and distinct.
    pub(crate) fn from_edges_trusted<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            debug_assert!(u != v && u < n && v < n);
            adj[u].push(v);
            adj[v].push(u);
            m += 1;
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
        }
        Graph { n, adj, m }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_vec(&self) -> Vec<Edge> {
        self.edges().collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Max degree restricted to `vs`.
    pub fn max_degree_on(&self, vs: &[Vertex]) -> usize {
        vs.iter().map(|&v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree_on(&self, vs: &[Vertex]) -> usize {
        vs.iter().map(|&v| self.degree(v)).min().unwrap_or(0)
    }

    /// Spanning subgraph on the same vertex set keeping edges where `keep` holds.
    pub fn filter_edges<F>(&self, mut keep: F) -> Graph
    where
        F: FnMut(Vertex, Vertex) -> bool,
    {
        let kept: Vec<Edge> = self.edges().filter(|&(u, v)| keep(u, v)).collect();
        Graph::from_edges_trusted(self.n, kept)
    }

    /// Edges of `self` that are not in `other`.
    pub fn difference(&self, other: &Graph) -> Graph {
        self.filter_edges(|u, v| !other.has_edge(u, v))
    }

    /// Union of two edge-disjoint graphs on the same vertex count.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph, GraphError> {
        let n = self.n.max(other.n);
        Graph::from_edges(n, self.edges().chain(other.edges()))
    }

    /// Returns true if every edge of `self` is an edge of `host`.
    pub fn is_subgraph_of(&self, host: &Graph) -> bool {
        self.edges().all(|(u, v)| host.has_edge(u, v))
    }
}

/// Summary returned by [`degree_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub min_degree: usize,
    pub max_degree: usize,
    pub edge_count: usize,
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    DegreeStats {
        min_degree: g.min_degree(),
        max_degree: g.max_degree(),
        edge_count: g.edge_count(),
    }
}

/// Subgraph induced on a vertex set, relabeled to `0..|s|`.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `labels[new] = old`.
    pub labels: Vec<Vertex>,
}

impl InducedSubgraph {
    pub fn to_host(&self, v: Vertex) -> Vertex {
        self.labels[v]
    }

    pub fn to_local(&self, v: Vertex) -> Option<Vertex> {
        self.labels.binary_search(&v).ok()
    }
}

pub fn induced_subgraph(g: &Graph, s: &[Vertex]) -> Result<InducedSubgraph, GraphError> {
    let mut labels: Vec<Vertex> = s.to_vec();
    labels.sort_unstable();
    labels.dedup();
    if let Some(&v) = labels.iter().find(|&&v| v >= g.n()) {
        return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in labels.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    for (i, &v) in labels.iter().enumerate() {
        for &w in g.neighbors(v) {
            let j = local[w];
            if j != usize::MAX && j > i {
                edges.push((i, j));
            }
        }
    }
    Ok(InducedSubgraph {
        graph: Graph::from_edges_trusted(labels.len(), edges),
        labels,
    })
}

/// Spanning subgraph keeping only edges with both endpoints in `s`
/// (host labels are preserved; vertices outside `s` become isolated).
pub fn restrict_to(g: &Graph, s: &[Vertex]) -> Graph {
    let mut inside = vec![false; g.n()];
    for &v in s {
        inside[v] = true;
    }
    g.filter_edges(|u, v| inside[u] && inside[v])
}

/// Ordered-pair count `e(A, B)`: pairs `(x, y)` with `xy` an edge, `x in a`, `y in b`.
pub fn crossing_pair_count(g: &Graph, a: &[Vertex], b: &[Vertex]) -> usize {
    let mut in_b = vec![false; g.n()];
    for &v in b {
        if v < g.n() {
            in_b[v] = true;
        }
    }
    let mut seen = vec![false; g.n()];
    let mut count = 0;
    for &x in a {
        if x >= g.n() || std::mem::replace(&mut seen[x], true) {
            continue;
        }
        count += g.neighbors(x).iter().filter(|&&y| in_b[y]).count();
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Two disjoint vertex sets, each kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    pub left: Vec<Vertex>,
    pub right: Vec<Vertex>,
}

impl Bipartition {
    pub fn new(mut left: Vec<Vertex>, mut right: Vec<Vertex>) -> Result<Self, GraphError> {
        left.sort_unstable();
        left.dedup();
        right.sort_unstable();
        right.dedup();
        let (mut i, mut j) = (0, 0);
        while i < left.len() && j < right.len() {
            match left[i].cmp(&right[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Err(GraphError::OverlappingSides(left[i])),
            }
        }
        Ok(Bipartition { left, right })
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_balanced(&self) -> bool {
        self.left.len() == self.right.len()
    }

    pub fn is_near_balanced(&self) -> bool {
        self.left.len().abs_diff(self.right.len()) <= 1
    }

    pub fn swapped(&self) -> Bipartition {
        Bipartition {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// Side lookup table over `0..n`.
    pub fn sides(&self, n: usize) -> Vec<Option<Side>> {
        let mut s = vec![None; n];
        for &v in &self.left {
            if v < n {
                s[v] = Some(Side::Left);
            }
        }
        for &v in &self.right {
            if v < n {
                s[v] = Some(Side::Right);
            }
        }
        s
    }

    /// All vertices, sorted.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut all: Vec<Vertex> = self.left.iter().chain(&self.right).copied().collect();
        all.sort_unstable();
        all
    }

    pub fn covers_exactly(&self, n: usize) -> bool {
        self.len() == n && self.vertices().iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// A graph together with a declared bipartition of (a subset of) its vertices.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    pub graph: Graph,
    pub bipartition: Bipartition,
}

impl BipartiteGraph {
    pub fn left(&self) -> &[Vertex] {
        &self.bipartition.left
    }

    pub fn right(&self) -> &[Vertex] {
        &self.bipartition.right
    }
}

/// Keeps exactly the edges of `g` with one endpoint on each side of `bp`.
pub fn induced_bipartite(g: &Graph, bp: &Bipartition) -> Result<BipartiteGraph, GraphError> {
    let bp = Bipartition::new(bp.left.clone(), bp.right.clone())?;
    if let Some(&v) = bp.left.iter().chain(&bp.right).find(|&&v| v >= g.n()) {
        return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let sides = bp.sides(g.n());
    let graph = g.filter_edges(|u, v| matches!((sides[u], sides[v]), (Some(a), Some(b)) if a != b));
    Ok(BipartiteGraph {
        graph,
        bipartition: bp,
    })
}

/// A spanning bipartite subgraph of a host on `host_n` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningBipartitePiece {
    pub host_n: usize,
    pub bipartition: Bipartition,
    pub edges: Vec<Edge>,
    pub degree: Option<usize>,
}

impl SpanningBipartitePiece {
    /// Validates the spanning and crossing invariants and computes the common degree.
    pub fn new(host_n: usize, bipartition: Bipartition, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let g = Graph::from_edges(host_n, edges)?;
        let sides = bipartition.sides(host_n);
        for (u, v) in g.edges() {
            match (sides[u], sides[v]) {
                (Some(a), Some(b)) if a != b => {}
                _ => return Err(GraphError::NonCrossingEdge(u, v)),
            }
        }
        let degree = if bipartition.covers_exactly(host_n) {
            g.regular_degree()
        } else {
            None
        };
        Ok(SpanningBipartitePiece {
            host_n,
            bipartition,
            edges: g.edge_vec(),
            degree,
        })
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges_trusted(self.host_n, self.edges.iter().copied())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Ordered edge-disjoint pieces of a host graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub host_n: usize,
    pub pieces: Vec<SpanningBipartitePiece>,
}

impl Decomposition {
    pub fn total_edges(&self) -> usize {
        self.pieces.iter().map(|p| p.edges.len()).sum()
    }

    /// True when the pieces are pairwise edge-disjoint and cover exactly `E(host)`.
    pub fn partitions(&self, host: &Graph) -> bool {
        let mut seen = BTreeSet::new();
        for p in &self.pieces {
            for &(u, v) in &p.edges {
                let e = edge(u, v);
                if !host.has_edge(e.0, e.1) || !seen.insert(e) {
                    return false;
                }
            }
        }
        seen.len() == host.edge_count()
    }
}

/// Parses the edge-list text format: a header `n m` followed by `m` lines `u v`.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing header \"n m\"".into(),
    })?;
    let (n, m) = parse_pair(hline, header)?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines.by_ref() {
        if edges.len() == m {
            return Err(GraphError::Parse {
                line,
                msg: format!("more than the declared {m} edges"),
            });
        }
        let (u, v) = parse_pair(line, l)?;
        for w in [u, v] {
            if w >= n {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("vertex {w} out of range 0..{n}"),
                });
            }
        }
        if u == v {
            return Err(GraphError::Parse {
                line,
                msg: format!("self-loop at {u}"),
            });
        }
        edges.push((line, u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: text.lines().count().max(1),
            msg: format!("expected {m} edges, found {}", edges.len()),
        });
    }
    let mut seen = BTreeSet::new();
    for &(line, u, v) in &edges {
        if !seen.insert(edge(u, v)) {
            return Err(GraphError::Parse {
                line,
                msg: format!("duplicate edge {u} {v}"),
            });
        }
    }
    Graph::from_edges(n, edges.into_iter().map(|(_, u, v)| (u, v)))
}

fn parse_pair(line: usize, s: &str) -> Result<(usize, usize), GraphError> {
    let mut it = s.split_whitespace();
    let mut next = |what: &str| -> Result<usize, GraphError> {
        let tok = it.next().ok_or_else(|| GraphError::Parse {
            line,
            msg: format!("missing {what}"),
        })?;
        tok.parse::<usize>().map_err(|_| GraphError::Parse {
            line,
            msg: format!("invalid integer {tok:?}"),
        })
    };
    let a = next("first integer")?;
    let b = next("second integer")?;
    if let Some(extra) = it.next() {
        return Err(GraphError::Parse {
            line,
            msg: format!("unexpected token {extra:?}"),
        });
    }
    Ok((a, b))
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.edge_count() * 10);
    out.push_str(&format!("{} {}\n", g.n(), g.edge_count()));
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn induced_subgraph_examples() {
        let k4 = complete(4);
        let all = induced_subgraph(&k4, &[0, 1, 2, 3]).unwrap();
        assert_eq!(all.graph, k4);
        let pair = induced_subgraph(&k4, &[0, 1]).unwrap();
        assert_eq!(pair.graph.n(), 2);
        assert_eq!(pair.graph.edge_vec(), vec![(0, 1)]);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let ends = induced_subgraph(&path, &[0, 2]).unwrap();
        assert_eq!(ends.graph.edge_count(), 0);
        assert_eq!(ends.to_host(1), 2);
        assert_eq!(ends.to_local(2), Some(1));
        assert!(induced_subgraph(&path, &[5]).is_err());
    }

    #[test]
    fn induced_bipartite_examples() {
        let k4 = complete(4);
        let bp = Bipartition::new(vec![0, 1], vec![2, 3]).unwrap();
        assert_eq!(induced_bipartite(&k4, &bp).unwrap().graph.edge_count(), 4);
        let empty = Graph::empty(4);
        assert_eq!(induced_bipartite(&empty, &bp).unwrap().graph.edge_count(), 0);
        let c6 = cycle(6);
        let alt = Bipartition::new(vec![0, 2, 4], vec![1, 3, 5]).unwrap();
        assert_eq!(induced_bipartite(&c6, &alt).unwrap().graph, c6);
        assert!(Bipartition::new(vec![0, 1], vec![1, 2]).is_err());
    }

    #[test]
    fn degree_stats_examples() {
        let s = degree_stats(&complete(5));
        assert_eq!((s.min_degree, s.max_degree, s.edge_count), (4, 4, 10));
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = degree_stats(&star);
        assert_eq!((s.min_degree, s.max_degree, s.edge_count), (1, 3, 3));
        let s = degree_stats(&Graph::empty(3));
        assert_eq!((s.min_degree, s.max_degree, s.edge_count), (0, 0, 0));
    }

    #[test]
    fn crossing_pair_count_examples() {
        let tri = complete(3);
        assert_eq!(crossing_pair_count(&tri, &[0, 1, 2], &[0, 1, 2]), 6);
        let e = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(crossing_pair_count(&e, &[0], &[1]), 1);
        assert_eq!(crossing_pair_count(&complete(4), &[0, 1], &[2, 3]), 4);
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = cycle(5);
        let text = write_edge_list(&g);
        assert_eq!(parse_edge_list(&text).unwrap(), g);
        let err = parse_edge_list("3 2\n0 1\n1 x\n").unwrap_err();
        assert_eq!(
            err,
            GraphError::Parse {
                line: 3,
                msg: "invalid integer \"x\"".into()
            }
        );
        assert!(matches!(
            parse_edge_list("3 2\n0 1\n1 0\n"),
            Err(GraphError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_edge_list("3 1\n0 3\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_edge_list("3 2\n0 1\n"), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn piece_requires_crossing_edges() {
        let bp = Bipartition::new(vec![0, 1], vec![2, 3]).unwrap();
        let p = SpanningBipartitePiece::new(4, bp.clone(), vec![(0, 2), (1, 3)]).unwrap();
        assert_eq!(p.degree, Some(1));
        assert!(SpanningBipartitePiece::new(4, bp, vec![(0, 1)]).is_err());
    }
}
