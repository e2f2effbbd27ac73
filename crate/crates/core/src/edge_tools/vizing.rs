//! Misra–Gries edge coloring with at most `Δ + 1` colors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{edge, Edge, Graph, Vertex};

const NONE: usize = usize::MAX;

/// A proper edge coloring. `colors` is sorted by edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    pub colors: BTreeMap<Edge, usize>,
    /// Number of colors in use, `max color + 1`.
    pub k: usize,
}

impl EdgeColoring {
    pub fn color(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.colors.get(&edge(u, v)).copied()
    }

    /// Edges of each color class, in lexicographic order.
    pub fn classes(&self) -> Vec<Vec<Edge>> {
        let mut out = vec![Vec::new(); self.k];
        for (&e, &c) in &self.colors {
            out[c].push(e);
        }
        out
    }

    /// Every edge of `g` is colored, nothing else is, and no two edges at a
    /// vertex share a color.
    pub fn is_proper_for(&self, g: &Graph) -> bool {
        if self.colors.len() != g.edge_count() {
            return false;
        }
        let mut seen = vec![Vec::<usize>::new(); g.n()];
        for (&(u, v), &c) in &self.colors {
            if !g.has_edge(u, v) || c >= self.k {
                return false;
            }
            for w in [u, v] {
                if seen[w].contains(&c) {
                    return false;
                }
                seen[w].push(c);
            }
        }
        true
    }
}

struct State {
    /// `at[v * palette + c]` is the neighbor joined to `v` by color `c`.
    at: Vec<usize>,
    palette: usize,
}

impl State {
    fn get(&self, v: Vertex, c: usize) -> usize {
        self.at[v * self.palette + c]
    }

    fn color_of(&self, u: Vertex, v: Vertex) -> Option<usize> {
        (0..self.palette).find(|&c| self.get(u, c) == v)
    }

    fn is_free(&self, v: Vertex, c: usize) -> bool {
        self.get(v, c) == NONE
    }

    fn free_color(&self, v: Vertex) -> usize {
        (0..self.palette)
            .find(|&c| self.is_free(v, c))
            .expect("degree below palette size")
    }

    fn set(&mut self, u: Vertex, v: Vertex, c: usize) {
        let p = self.palette;
        self.at[u * p + c] = v;
        self.at[v * p + c] = u;
    }

    fn clear(&mut self, u: Vertex, v: Vertex, c: usize) {
        let p = self.palette;
        self.at[u * p + c] = NONE;
        self.at[v * p + c] = NONE;
    }
}

/// Colors the edges of `g` properly with at most `Δ(g) + 1` colors.
pub fn vizing_color(g: &Graph) -> EdgeColoring {
    let palette = g.max_degree() + 1;
    let mut st = State {
        at: vec![NONE; g.n() * palette],
        palette,
    };
    for (u, v) in g.edges() {
        color_edge(&mut st, u, v);
    }
    let mut colors = BTreeMap::new();
    let mut k = 0;
    for (u, v) in g.edges() {
        let c = st.color_of(u, v).expect("every edge colored");
        k = k.max(c + 1);
        colors.insert((u, v), c);
    }
    EdgeColoring { colors, k }
}

fn color_edge(st: &mut State, u: Vertex, v: Vertex) {
    // Maximal fan at u starting with the uncolored edge uv.
    let mut fan = vec![v];
    let mut in_fan = std::collections::HashSet::from([v]);
    loop {
        let last = *fan.last().unwrap();
        let next = (0..st.palette)
            .filter(|&c| st.is_free(last, c))
            .map(|c| st.get(u, c))
            .find(|&w| w != NONE && !in_fan.contains(&w));
        match next {
            Some(w) => {
                fan.push(w);
                in_fan.insert(w);
            }
            None => break,
        }
    }
    let c = st.free_color(u);
    let d = st.free_color(*fan.last().unwrap());

    // Swap colors on the maximal path from u alternating d and c.
    if c != d {
        let mut path = Vec::new();
        let (mut x, mut col) = (u, d);
        while st.get(x, col) != NONE {
            let y = st.get(x, col);
            path.push((x, y, col));
            x = y;
            col = if col == d { c } else { d };
        }
        for &(a, b, col) in &path {
            st.clear(a, b, col);
        }
        for &(a, b, col) in &path {
            st.set(a, b, if col == d { c } else { d });
        }
    }

    // First fan vertex where d is free whose prefix is still a fan.
    let mut w = None;
    for i in 0..fan.len() {
        if i > 0 {
            let ok = st
                .color_of(u, fan[i])
                .is_some_and(|col| st.is_free(fan[i - 1], col));
            if !ok {
                break;
            }
        }
        if st.is_free(fan[i], d) {
            w = Some(i);
            break;
        }
    }
    let w = w.expect("fan vertex with d free exists");
    for i in 0..w {
        let col = st.color_of(u, fan[i + 1]).expect("fan edges are colored");
        st.clear(u, fan[i + 1], col);
        st.set(u, fan[i], col);
    }
    st.set(u, fan[w], d);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circulant, complete, random_regular};

    fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, edges).unwrap()
    }

    #[test]
    fn small_examples() {
        let m = circulant(8, &[4]).unwrap();
        let c = vizing_color(&m);
        assert!(c.is_proper_for(&m));
        assert_eq!(c.k, 1);

        let c5 = circulant(5, &[1]).unwrap();
        let c = vizing_color(&c5);
        assert!(c.is_proper_for(&c5));
        assert_eq!(c.k, 3);

        let p = petersen();
        let c = vizing_color(&p);
        assert!(c.is_proper_for(&p));
        assert!(c.k <= 4);
    }

    #[test]
    fn dense_graphs() {
        for n in [4, 7, 12, 17] {
            let g = complete(n).unwrap();
            let c = vizing_color(&g);
            assert!(c.is_proper_for(&g));
            assert!(c.k <= n);
        }
        for seed in 0..5 {
            let g = random_regular(50, 9, seed).unwrap();
            let c = vizing_color(&g);
            assert!(c.is_proper_for(&g) && c.k <= 10);
        }
    }

    #[test]
    fn classes_partition_edges() {
        let g = random_regular(30, 5, 1).unwrap();
        let c = vizing_color(&g);
        let total: usize = c.classes().iter().map(Vec::len).sum();
        assert_eq!(total, g.edge_count());
    }

    #[test]
    fn improper_coloring_detected() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let bad = EdgeColoring {
            colors: BTreeMap::from([((0, 1), 0), ((1, 2), 0)]),
            k: 1,
        };
        assert!(!bad.is_proper_for(&g));
    }
}
