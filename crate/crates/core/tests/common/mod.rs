//! Independent oracles shared by the integration tests. Nothing here calls
//! into the checkers of the library under test.

#![allow(dead_code)]

use std::collections::HashSet;

use rand::Rng;
use regbip::graph::{Decomposition, Edge, Graph};

pub fn norm(u: usize, v: usize) -> Edge {
    (u.min(v), u.max(v))
}

pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, edges).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn degrees(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut deg = vec![0; n];
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    deg
}

/// Does the bipartite graph with sides `x`, `y` and `edges` have a spanning
/// subgraph with degree exactly `f[v]` at every vertex? Backtracking over the
/// neighbor subsets of each `x` in turn.
pub fn f_factor_exists(x: &[usize], y: &[usize], edges: &[Edge], f: &[usize]) -> bool {
    let fx: usize = x.iter().map(|&v| f[v]).sum();
    let fy: usize = y.iter().map(|&v| f[v]).sum();
    if fx != fy {
        return false;
    }
    let nbrs: Vec<Vec<usize>> = x
        .iter()
        .map(|&u| {
            edges
                .iter()
                .filter_map(|&(a, b)| if a == u { Some(b) } else if b == u { Some(a) } else { None })
                .collect()
        })
        .collect();
    let mut room = f.to_vec();
    fn go(i: usize, x: &[usize], nbrs: &[Vec<usize>], f: &[usize], room: &mut [usize]) -> bool {
        if i == x.len() {
            return room.iter().all(|&r| r == 0);
        }
        choose(0, f[x[i]], &nbrs[i], i, x, nbrs, f, room)
    }
    #[allow(clippy::too_many_arguments)]
    fn choose(start: usize, left: usize, cand: &[usize], i: usize, x: &[usize], nbrs: &[Vec<usize>], f: &[usize], room: &mut [usize]) -> bool {
        if left == 0 {
            let u = x[i];
            let saved = room[u];
            room[u] = 0;
            let ok = go(i + 1, x, nbrs, f, room);
            room[u] = saved;
            return ok;
        }
        for k in start..cand.len() {
            if cand.len() - k < left {
                break;
            }
            let w = cand[k];
            if room[w] > 0 {
                room[w] -= 1;
                let ok = choose(k + 1, left - 1, cand, i, x, nbrs, f, room);
                room[w] += 1;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    go(0, x, &nbrs, f, &mut room)
}

/// Edges shared by a proper coloring: `None` if proper, else a clash.
pub fn coloring_clash(g: &Graph, color: impl Fn(usize, usize) -> Option<usize>) -> Option<String> {
    for v in 0..g.n() {
        let mut seen = HashSet::new();
        for &w in g.neighbors(v) {
            match color(v, w) {
                None => return Some(format!("edge {v}-{w} uncolored")),
                Some(c) if !seen.insert(c) => return Some(format!("color {c} repeats at {v}")),
                _ => {}
            }
        }
    }
    None
}

/// Can the edges of `g` be properly colored with `k` colors? Plain
/// backtracking, for small graphs only.
pub fn edge_colorable(g: &Graph, k: usize) -> bool {
    let edges: Vec<Edge> = g.edges().collect();
    let mut used = vec![0u64; g.n()];
    fn go(i: usize, edges: &[Edge], k: usize, used: &mut [u64]) -> bool {
        if i == edges.len() {
            return true;
        }
        let (u, v) = edges[i];
        for c in 0..k {
            let bit = 1u64 << c;
            if used[u] & bit == 0 && used[v] & bit == 0 {
                used[u] |= bit;
                used[v] |= bit;
                if go(i + 1, edges, k, used) {
                    return true;
                }
                used[u] &= !bit;
                used[v] &= !bit;
            }
        }
        false
    }
    go(0, &edges, k, &mut used)
}

/// Recounts a decomposition of `g`: pieces are edge-disjoint, cover every
/// edge, span all vertices with a proper 2-coloring, and are regular.
/// Returns the piece degrees.
pub fn check_decomposition(g: &Graph, dec: &Decomposition) -> Result<Vec<usize>, String> {
    let n = g.n();
    let host: HashSet<Edge> = g.edges().map(|(u, v)| norm(u, v)).collect();
    let mut seen = HashSet::new();
    let mut degrees_out = Vec::new();
    for (i, p) in dec.pieces.iter().enumerate() {
        let mut side = vec![None; n];
        for &v in &p.bipartition.left {
            side[v] = Some(false);
        }
        for &v in &p.bipartition.right {
            if side[v].is_some() {
                return Err(format!("piece {i}: vertex {v} on both sides"));
            }
            side[v] = Some(true);
        }
        if side.iter().any(Option::is_none) || p.bipartition.left.len() + p.bipartition.right.len() != n {
            return Err(format!("piece {i}: not spanning"));
        }
        for &(u, v) in &p.edges {
            let e = norm(u, v);
            if !host.contains(&e) {
                return Err(format!("piece {i}: {u}-{v} is not a host edge"));
            }
            if !seen.insert(e) {
                return Err(format!("piece {i}: {u}-{v} used twice"));
            }
            if side[u] == side[v] {
                return Err(format!("piece {i}: {u}-{v} inside one side"));
            }
        }
        let deg = degrees(n, &p.edges);
        if deg.iter().any(|&x| x != deg[0]) {
            return Err(format!("piece {i}: not regular"));
        }
        degrees_out.push(deg[0]);
    }
    if seen.len() != host.len() {
        return Err(format!("pieces cover {} of {} edges", seen.len(), host.len()));
    }
    Ok(degrees_out)
}

/// Checks that `matchings` are perfect matchings partitioning `E(g)`.
pub fn check_one_factorization(g: &Graph, matchings: &[Vec<Edge>]) -> Result<(), String> {
    let host: HashSet<Edge> = g.edges().map(|(u, v)| norm(u, v)).collect();
    let mut seen = HashSet::new();
    for (i, m) in matchings.iter().enumerate() {
        let deg = degrees(g.n(), m);
        if deg.iter().any(|&x| x != 1) {
            return Err(format!("matching {i} is not perfect"));
        }
        for &(u, v) in m {
            let e = norm(u, v);
            if !host.contains(&e) || !seen.insert(e) {
                return Err(format!("matching {i}: edge {u}-{v} foreign or repeated"));
            }
        }
    }
    if seen.len() != host.len() {
        return Err(format!("matchings cover {} of {} edges", seen.len(), host.len()));
    }
    Ok(())
}
