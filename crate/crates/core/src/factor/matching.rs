use std::collections::VecDeque;

use super::FactorError;
use crate::graph::{edge, Edge, Graph, SpanningBipartitePiece, Vertex};

const FREE: usize = usize::MAX;

/// Maximum matching of the bipartite graph `g` with left side `left`,
/// by Hopcroft–Karp. Returns `mate[v]` for every vertex (`None` if unmatched).
pub fn hopcroft_karp(g: &Graph, left: &[Vertex]) -> Vec<Option<Vertex>> {
    let n = g.n();
    let mut mate = vec![FREE; n];
    let mut dist = vec![usize::MAX; n];
    loop {
        // Layered BFS from free left vertices.
        let mut queue = VecDeque::new();
        for &x in left {
            if mate[x] == FREE {
                dist[x] = 0;
                queue.push_back(x);
            } else {
                dist[x] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                match mate[y] {
                    FREE => found = true,
                    x2 if dist[x2] == usize::MAX => {
                        dist[x2] = dist[x] + 1;
                        queue.push_back(x2);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        for &x in left {
            if mate[x] == FREE {
                augment(g, x, &mut mate, &mut dist);
            }
        }
    }
    mate.into_iter().map(|m| (m != FREE).then_some(m)).collect()
}

fn augment(g: &Graph, x: Vertex, mate: &mut [usize], dist: &mut [usize]) -> bool {
    for &y in g.neighbors(x) {
        let next = mate[y];
        if next == FREE || (dist[next] == dist[x] + 1 && augment(g, next, mate, dist)) {
            mate[x] = y;
            mate[y] = x;
            return true;
        }
    }
    dist[x] = usize::MAX;
    false
}

/// Splits an `r`-regular balanced bipartite spanning piece into `r` perfect matchings.
pub fn one_factorize(piece: &SpanningBipartitePiece) -> Result<Vec<Vec<Edge>>, FactorError> {
    let n = piece.host_n;
    let bp = &piece.bipartition;
    if !bp.covers_exactly(n) || !bp.is_balanced() {
        return Err(FactorError::NotBalanced);
    }
    let mut g = Graph::from_edges(n, piece.edges.iter().copied()).map_err(|e| FactorError::Internal(e.to_string()))?;
    let r = match g.regular_degree() {
        Some(r) if piece.degree.is_none_or(|d| d == r) => r,
        _ => return Err(FactorError::NotRegular),
    };
    let sides = bp.sides(n);
    if let Some((u, v)) = g.edges().find(|&(u, v)| sides[u] == sides[v]) {
        return Err(FactorError::NotBipartite(u, v));
    }
    let mut out = Vec::with_capacity(r);
    for _ in 0..r {
        let mate = hopcroft_karp(&g, &bp.left);
        let matching: Vec<Edge> = bp
            .left
            .iter()
            .filter_map(|&x| mate[x].map(|y| edge(x, y)))
            .collect();
        if matching.len() != bp.left.len() {
            return Err(FactorError::Internal(format!(
                "regular bipartite graph without a perfect matching ({} of {})",
                matching.len(),
                bp.left.len()
            )));
        }
        let m = Graph::from_edges_trusted(n, matching.iter().copied());
        g = g.difference(&m);
        out.push(matching);
    }
    debug_assert_eq!(g.edge_count(), 0);
    Ok(out)
}
