use thiserror::Error;

use super::vizing::vizing_color;
use crate::graph::{Edge, Graph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubgraphError {
    #[error("m = {m} outside 1..={edges}")]
    OutOfRange { m: usize, edges: usize },
    #[error("spread bound violated: {spread} > {bound}")]
    SpreadBound { spread: usize, bound: usize },
    #[error("removed-degree bound violated: {degree} > {bound}")]
    RemovedDegreeBound { degree: usize, bound: f64 },
}

/// Result of [`m_edge_subgraph`]: `kept ⊎ removed = h`.
#[derive(Debug, Clone)]
pub struct Trimmed {
    pub kept: Graph,
    pub removed: Graph,
    /// Number of color classes touched by the removal.
    pub classes_used: usize,
}

/// Spread bound on the kept graph: `Δ(h) − δ(h) + 2`.
pub fn spread_bound(h: &Graph) -> usize {
    h.max_degree() - h.min_degree() + 2
}

/// Bound on the removed graph's max degree: `(Δ(h) + 1)(e(h) − m)/e(h) + 1`.
pub fn removed_degree_bound(h: &Graph, m: usize) -> f64 {
    let e = h.edge_count() as f64;
    (h.max_degree() as f64 + 1.0) * (e - m as f64) / e + 1.0
}

/// Spanning subgraph of `h` with exactly `m` edges.
///
/// Colors `h` with at most `Δ + 1` matchings, orders them by size (largest
/// first, lower color on ties), and removes whole leading classes plus a
/// prefix of the next one. Within that class, edges with the largest
/// endpoint-degree sum go first. Both degree bounds are checked before
/// returning.
pub fn m_edge_subgraph(h: &Graph, m: usize) -> Result<Trimmed, SubgraphError> {
    let total = h.edge_count();
    if m < 1 || m > total {
        return Err(SubgraphError::OutOfRange { m, edges: total });
    }
    if m == total {
        return Ok(Trimmed {
            kept: h.clone(),
            removed: Graph::empty(h.n()),
            classes_used: 0,
        });
    }
    let mut classes: Vec<(usize, Vec<Edge>)> = vizing_color(h).classes().into_iter().enumerate().collect();
    classes.sort_by(|(i, a), (j, b)| b.len().cmp(&a.len()).then(i.cmp(j)));

    let mut need = total - m;
    let mut removed = Vec::with_capacity(need);
    let mut classes_used = 0;
    for (_, class) in &classes {
        if need == 0 {
            break;
        }
        classes_used += 1;
        if class.len() <= need {
            removed.extend_from_slice(class);
            need -= class.len();
        } else {
            let mut order = class.clone();
            order.sort_by(|&(a, b), &(c, d)| {
                let ka = h.degree(a) + h.degree(b);
                let kc = h.degree(c) + h.degree(d);
                kc.cmp(&ka).then((a, b).cmp(&(c, d)))
            });
            removed.extend_from_slice(&order[..need]);
            need = 0;
        }
    }
    removed.sort_unstable();
    let removed = Graph::from_edges_trusted(h.n(), removed);
    let kept = h.difference(&removed);
    debug_assert_eq!(kept.edge_count(), m);

    let spread = kept.max_degree() - kept.min_degree();
    let bound = spread_bound(h);
    if spread > bound {
        return Err(SubgraphError::SpreadBound { spread, bound });
    }
    let bound = removed_degree_bound(h, m);
    if removed.max_degree() as f64 > bound + 1e-9 {
        return Err(SubgraphError::RemovedDegreeBound {
            degree: removed.max_degree(),
            bound,
        });
    }
    Ok(Trimmed {
        kept,
        removed,
        classes_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circulant, complete, random_regular};

    #[test]
    fn identity_when_m_is_full() {
        let g = complete(5).unwrap();
        let t = m_edge_subgraph(&g, 10).unwrap();
        assert_eq!(t.kept, g);
        assert_eq!(t.removed.edge_count(), 0);
    }

    #[test]
    fn matching_halved() {
        let g = circulant(8, &[4]).unwrap();
        let t = m_edge_subgraph(&g, 2).unwrap();
        assert_eq!(t.kept.edge_count(), 2);
        assert_eq!(t.removed.max_degree(), 1);
        assert!(t.kept.is_subgraph_of(&g) && t.removed.is_subgraph_of(&g));
    }

    #[test]
    fn k4_to_three_edges() {
        let g = complete(4).unwrap();
        let t = m_edge_subgraph(&g, 3).unwrap();
        assert_eq!(t.kept.edge_count(), 3);
        assert!(t.kept.max_degree() - t.kept.min_degree() <= 2);
        assert!(t.removed.max_degree() as f64 <= 3.0);
        assert_eq!(t.kept.difference(&g).edge_count(), 0);
        assert_eq!(t.kept.edge_count() + t.removed.edge_count(), 6);
    }

    #[test]
    fn out_of_range() {
        let g = complete(4).unwrap();
        assert!(m_edge_subgraph(&g, 0).is_err());
        assert!(m_edge_subgraph(&g, 7).is_err());
    }

    #[test]
    fn bounds_on_random_graphs() {
        for seed in 0..20u64 {
            let g = random_regular(40, 7 + (seed as usize % 2), seed).unwrap();
            for m in [1, g.edge_count() / 3, g.edge_count() / 2, g.edge_count() - 1] {
                let t = m_edge_subgraph(&g, m).unwrap();
                assert_eq!(t.kept.edge_count(), m);
                assert_eq!(t.removed.edge_count(), g.edge_count() - m);
            }
        }
    }
}
