use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::graph::{edge, Decomposition, Graph, Side};

/// Outcome of checking a decomposition against its host, recomputed from raw edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub edge_partition_ok: bool,
    pub all_spanning: bool,
    pub all_bipartite: bool,
    pub all_regular: bool,
    /// Common degree of each piece, `None` where the piece is not regular.
    pub piece_degrees: Vec<Option<usize>>,
    pub part_count: usize,
    /// `log₂ d + 36`.
    pub bound: f64,
    pub within_bound: bool,
    /// Human-readable reasons for every failed check.
    pub problems: Vec<String>,
}

impl VerificationReport {
    pub fn all_green(&self) -> bool {
        self.edge_partition_ok && self.all_spanning && self.all_bipartite && self.all_regular && self.within_bound
    }
}

/// The part-count bound `log₂ d + 36` (36 for `d ≤ 1`).
pub fn part_bound(d: usize) -> f64 {
    (d.max(1) as f64).log2() + 36.0
}

/// Checks that `dec` splits `E(g)` into spanning regular bipartite pieces
/// and that the number of pieces is within the bound.
pub fn verify(g: &Graph, dec: &Decomposition) -> VerificationReport {
    let n = g.n();
    let mut problems = Vec::new();
    let d = g.regular_degree();
    if d.is_none() {
        problems.push("host graph is not regular".to_string());
    }
    let bound = part_bound(d.unwrap_or_else(|| g.max_degree()));

    let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(g.edge_count());
    let mut partition_ok = dec.host_n == n;
    if dec.host_n != n {
        problems.push(format!("decomposition is for {} vertices, host has {n}", dec.host_n));
    }
    let mut all_spanning = true;
    let mut all_bipartite = true;
    let mut all_regular = true;
    let mut degrees = Vec::with_capacity(dec.pieces.len());

    for (i, piece) in dec.pieces.iter().enumerate() {
        let bp = &piece.bipartition;
        let mut side = vec![None; n];
        let mut overlap_or_range = false;
        for (v, s) in bp.left.iter().map(|&v| (v, Side::Left)).chain(bp.right.iter().map(|&v| (v, Side::Right))) {
            if v >= n || side[v].is_some() {
                overlap_or_range = true;
            } else {
                side[v] = Some(s);
            }
        }
        if overlap_or_range || side.iter().any(Option::is_none) {
            all_spanning = false;
            problems.push(format!("piece {i}: bipartition does not cover the vertex set exactly once"));
        }

        let mut deg = vec![0usize; n];
        let mut bad_edge = None;
        let mut local: HashSet<(usize, usize)> = HashSet::with_capacity(piece.edges.len());
        for &(a, b) in &piece.edges {
            if a >= n || b >= n || a == b {
                partition_ok = false;
                problems.push(format!("piece {i}: invalid edge ({a}, {b})"));
                continue;
            }
            let e = edge(a, b);
            if !local.insert(e) || !seen.insert(e) {
                partition_ok = false;
                problems.push(format!("piece {i}: edge {e:?} repeated"));
            }
            if !g.has_edge(a, b) {
                partition_ok = false;
                problems.push(format!("piece {i}: edge {e:?} not in host"));
            }
            deg[a] += 1;
            deg[b] += 1;
            match (side[a], side[b]) {
                (Some(x), Some(y)) if x != y => {}
                _ => bad_edge = bad_edge.or(Some(e)),
            }
        }
        if let Some(e) = bad_edge {
            all_bipartite = false;
            problems.push(format!("piece {i}: edge {e:?} does not cross the bipartition"));
        }
        let r = deg.first().copied().unwrap_or(0);
        let regular = deg.iter().all(|&x| x == r);
        if !regular {
            all_regular = false;
            problems.push(format!("piece {i}: not regular"));
        }
        degrees.push(regular.then_some(r));
    }
    if seen.len() != g.edge_count() {
        partition_ok = false;
        problems.push(format!("pieces cover {} of {} host edges", seen.len(), g.edge_count()));
    }
    let part_count = dec.pieces.len();
    let within_bound = (part_count as f64) <= bound;
    if !within_bound {
        problems.push(format!("{part_count} parts exceed the bound {bound:.3}"));
    }
    VerificationReport {
        edge_partition_ok: partition_ok,
        all_spanning,
        all_bipartite,
        all_regular,
        piece_degrees: degrees,
        part_count,
        bound,
        within_bound,
        problems,
    }
}
