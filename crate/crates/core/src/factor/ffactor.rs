use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::flow::FlowNetwork;
use super::mincost::CostFlowNetwork;
use super::FactorError;
use crate::graph::{BipartiteGraph, Bipartition, Edge, Graph, Side, Vertex};

/// Largest side size for the exhaustive certificate search.
pub const EXHAUSTIVE_SIDE_LIMIT: usize = 20;

/// Target degrees `f` on the vertices of a bipartite graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSpec {
    pub targets: BTreeMap<Vertex, usize>,
}

impl DegreeSpec {
    pub fn from_fn(bp: &Bipartition, mut f: impl FnMut(Vertex) -> usize) -> Self {
        DegreeSpec {
            targets: bp.left.iter().chain(&bp.right).map(|&v| (v, f(v))).collect(),
        }
    }

    pub fn constant(bp: &Bipartition, c: usize) -> Self {
        Self::from_fn(bp, |_| c)
    }

    /// Zero outside the domain.
    pub fn get(&self, v: Vertex) -> usize {
        self.targets.get(&v).copied().unwrap_or(0)
    }

    pub fn sum(&self, vs: &[Vertex]) -> usize {
        vs.iter().map(|&v| self.get(v)).sum()
    }

    /// `(f(X), f(Y))`.
    pub fn side_sums(&self, bp: &Bipartition) -> (usize, usize) {
        (self.sum(&bp.left), self.sum(&bp.right))
    }
}

/// Witness `(S, T)` with `e(S, T) < f(S) + f(T) − f(X)`, which rules out an
/// `f`-factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OreCertificate {
    #[serde(rename = "S")]
    pub s: Vec<Vertex>,
    #[serde(rename = "T")]
    pub t_set: Vec<Vertex>,
    pub lhs: i64,
    pub rhs: i64,
}

impl OreCertificate {
    /// Builds the certificate for `(S, T)` by direct counting.
    pub fn evaluate(h: &BipartiteGraph, f: &DegreeSpec, s: Vec<Vertex>, t_set: Vec<Vertex>) -> Self {
        let lhs = crate::graph::crossing_pair_count(&h.graph, &s, &t_set) as i64;
        let rhs = f.sum(&s) as i64 + f.sum(&t_set) as i64 - f.sum(h.left()) as i64;
        OreCertificate { s, t_set, lhs, rhs }
    }

    /// Recounts from scratch and confirms the violation.
    pub fn is_valid_for(&self, h: &BipartiteGraph, f: &DegreeSpec) -> bool {
        let sides = h.bipartition.sides(h.graph.n());
        let in_x = self.s.iter().all(|&v| v < sides.len() && sides[v] == Some(Side::Left));
        let in_y = self.t_set.iter().all(|&v| v < sides.len() && sides[v] == Some(Side::Right));
        let again = Self::evaluate(h, f, self.s.clone(), self.t_set.clone());
        in_x && in_y && again.lhs == self.lhs && again.rhs == self.rhs && self.lhs < self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOutcome {
    Factor(Graph),
    Certificate(OreCertificate),
}

impl FactorOutcome {
    pub fn factor(&self) -> Option<&Graph> {
        match self {
            FactorOutcome::Factor(g) => Some(g),
            FactorOutcome::Certificate(_) => None,
        }
    }
}

fn check_instance(h: &BipartiteGraph, f: &DegreeSpec) -> Result<(usize, usize), FactorError> {
    let n = h.graph.n();
    let sides = h.bipartition.sides(n);
    if let Some((u, v)) = h
        .graph
        .edges()
        .find(|&(u, v)| !matches!((sides[u], sides[v]), (Some(a), Some(b)) if a != b))
    {
        return Err(FactorError::NotBipartite(u, v));
    }
    if let Some(&v) = f.targets.keys().find(|&&v| v >= n || sides[v].is_none()) {
        return Err(FactorError::OutsideDomain(v));
    }
    let (fx, fy) = f.side_sums(&h.bipartition);
    if fx != fy {
        return Err(FactorError::SideSumMismatch { fx, fy });
    }
    Ok((fx, fy))
}

/// Finds an `f`-factor of `h` by max flow, or an Ore certificate that none exists.
pub fn f_factor(h: &BipartiteGraph, f: &DegreeSpec) -> Result<FactorOutcome, FactorError> {
    let (fx, _) = check_instance(h, f)?;
    let n = h.graph.n();
    let (source, sink) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for &x in h.left() {
        net.add_arc(source, x, f.get(x) as u64);
    }
    for &y in h.right() {
        net.add_arc(y, sink, f.get(y) as u64);
    }
    let sides = h.bipartition.sides(n);
    let mut middle: Vec<(Edge, _)> = Vec::with_capacity(h.graph.edge_count());
    for (u, v) in h.graph.edges() {
        let (x, y) = if sides[u] == Some(Side::Left) { (u, v) } else { (v, u) };
        middle.push(((u, v), net.add_arc(x, y, 1)));
    }
    let flow = net.max_flow(source, sink);
    if flow == fx as u64 {
        let edges = middle.into_iter().filter(|(_, id)| net.flow(*id) == 1).map(|(e, _)| e);
        return Ok(FactorOutcome::Factor(Graph::from_edges_trusted(n, edges)));
    }
    // Min cut from the residual source side R: S = X ∩ R, T = Y \ R.
    let reach = net.residual_reachable(source);
    let s: Vec<Vertex> = h.left().iter().copied().filter(|&x| reach[x]).collect();
    let t: Vec<Vertex> = h.right().iter().copied().filter(|&y| !reach[y]).collect();
    let cert = OreCertificate::evaluate(h, f, s, t);
    if cert.lhs < cert.rhs {
        return Ok(FactorOutcome::Certificate(cert));
    }
    if h.left().len() <= EXHAUSTIVE_SIDE_LIMIT {
        if let Some(c) = exhaustive_certificate(h, f) {
            return Ok(FactorOutcome::Certificate(c));
        }
    }
    Err(FactorError::Internal(format!(
        "max flow {flow} < f(X) = {fx} but no Ore certificate found"
    )))
}

/// Like [`f_factor`], but among all `f`-factors returns one of least total
/// `cost(x, y)` over its edges (`x` on the left side). Costs must be
/// non-negative.
pub fn min_cost_f_factor(
    h: &BipartiteGraph,
    f: &DegreeSpec,
    cost: impl Fn(Vertex, Vertex) -> i64,
) -> Result<FactorOutcome, FactorError> {
    let (fx, _) = check_instance(h, f)?;
    let n = h.graph.n();
    let (source, sink) = (n, n + 1);
    let mut net = CostFlowNetwork::new(n + 2);
    for &x in h.left() {
        net.add_arc(source, x, f.get(x) as u64, 0);
    }
    for &y in h.right() {
        net.add_arc(y, sink, f.get(y) as u64, 0);
    }
    let sides = h.bipartition.sides(n);
    let mut middle = Vec::with_capacity(h.graph.edge_count());
    for (u, v) in h.graph.edges() {
        let (x, y) = if sides[u] == Some(Side::Left) { (u, v) } else { (v, u) };
        middle.push(((u, v), net.add_arc(x, y, 1, cost(x, y))));
    }
    let (flow, _) = net.min_cost_flow(source, sink, fx as u64);
    if flow < fx as u64 {
        // Infeasible: the plain solver produces the certificate.
        return f_factor(h, f);
    }
    let edges = middle.into_iter().filter(|(_, id)| net.flow(*id) == 1).map(|(e, _)| e);
    Ok(FactorOutcome::Factor(Graph::from_edges_trusted(n, edges)))
}

/// Searches every `S ⊆ X` with the best `T` for that `S`.
pub fn exhaustive_certificate(h: &BipartiteGraph, f: &DegreeSpec) -> Option<OreCertificate> {
    let xs = h.left();
    assert!(xs.len() < 64);
    for mask in 0u64..(1u64 << xs.len()) {
        let s: Vec<Vertex> = (0..xs.len()).filter(|i| mask >> i & 1 == 1).map(|i| xs[i]).collect();
        let s_mask: std::collections::HashSet<Vertex> = s.iter().copied().collect();
        let t: Vec<Vertex> = h
            .right()
            .iter()
            .copied()
            .filter(|&y| {
                let e = h.graph.neighbors(y).iter().filter(|w| s_mask.contains(w)).count();
                (e as i64) < f.get(y) as i64
            })
            .collect();
        let c = OreCertificate::evaluate(h, f, s, t);
        if c.lhs < c.rhs {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bip(nx: usize, ny: usize, edges: &[(usize, usize)]) -> BipartiteGraph {
        let e = edges.iter().map(|&(x, y)| (x, nx + y));
        BipartiteGraph {
            graph: Graph::from_edges(nx + ny, e).unwrap(),
            bipartition: Bipartition::new((0..nx).collect(), (nx..nx + ny).collect()).unwrap(),
        }
    }

    #[test]
    fn k33_perfect_matching() {
        let edges: Vec<_> = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        let h = bip(3, 3, &edges);
        let f = DegreeSpec::constant(&h.bipartition, 1);
        let g = f_factor(&h, &f).unwrap().factor().cloned().unwrap();
        assert_eq!(g.regular_degree(), Some(1));
        assert!(g.is_subgraph_of(&h.graph));
    }

    #[test]
    fn c4_whole() {
        let h = bip(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let f = DegreeSpec::constant(&h.bipartition, 2);
        assert_eq!(f_factor(&h, &f).unwrap().factor().unwrap(), &h.graph);
    }

    #[test]
    fn missing_edge_certificate() {
        // x1=0, x2=1, y1=2, y2=3.
        let h = bip(2, 2, &[(0, 0), (0, 1), (1, 0)]);
        let f = DegreeSpec {
            targets: BTreeMap::from([(0, 0), (1, 1), (2, 0), (3, 1)]),
        };
        match f_factor(&h, &f).unwrap() {
            FactorOutcome::Certificate(c) => {
                assert_eq!((c.s.clone(), c.t_set.clone(), c.lhs, c.rhs), (vec![1], vec![3], 0, 1));
                assert!(c.is_valid_for(&h, &f));
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn rejects_mismatch_and_bad_domain() {
        let h = bip(2, 2, &[(0, 0)]);
        let f = DegreeSpec {
            targets: BTreeMap::from([(0, 1), (1, 0), (2, 0), (3, 0)]),
        };
        assert_eq!(f_factor(&h, &f), Err(FactorError::SideSumMismatch { fx: 1, fy: 0 }));
        let f = DegreeSpec {
            targets: BTreeMap::from([(9, 1)]),
        };
        assert!(matches!(f_factor(&h, &f), Err(FactorError::OutsideDomain(9))));
    }

    #[test]
    fn certificate_json_keys() {
        let c = OreCertificate { s: vec![1], t_set: vec![3], lhs: 0, rhs: 1 };
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"S":[1],"T":[3],"lhs":0,"rhs":1}"#);
    }

    #[test]
    fn min_cost_picks_cheaper_perfect_matching() {
        let h = bip(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let f = DegreeSpec::constant(&h.bipartition, 1);
        // Vertices: x0=0, x1=1, y0=2, y1=3. The diagonal costs 2, the anti-diagonal 0.
        let out = min_cost_f_factor(&h, &f, |x, y| i64::from((x + 2 == y) as u8)).unwrap();
        let g = out.factor().unwrap();
        assert!(g.has_edge(0, 3) && g.has_edge(1, 2));
        let blocked = bip(2, 2, &[(0, 0), (1, 1)]);
        let f2 = DegreeSpec::constant(&blocked.bipartition, 2);
        assert!(matches!(min_cost_f_factor(&blocked, &f2, |_, _| 0).unwrap(), FactorOutcome::Certificate(_)));
    }

    #[test]
    fn demand_above_degree_gives_certificate() {
        let h = bip(2, 2, &[(0, 0), (1, 1)]);
        let f = DegreeSpec::constant(&h.bipartition, 2);
        match f_factor(&h, &f).unwrap() {
            FactorOutcome::Certificate(c) => assert!(c.is_valid_for(&h, &f)),
            other => panic!("{other:?}"),
        }
    }
}
