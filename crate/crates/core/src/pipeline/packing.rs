//! Edge pricing for the sequential regularization in practical mode.
//!
//! Every pair's demand is known before the first factor is chosen, so each
//! factor can avoid the pool edges that later pairs depend on most.

use crate::graph::{BipartiteGraph, Graph, Vertex};

/// Fixed-point scale for the edge costs handed to the min-cost solver.
const COST_SCALE: f64 = 1000.0;

const MAX_BOOST: f64 = 1024.0;

/// Demand of one pair, with the quarter each vertex draws from.
struct PairPlan {
    /// `0` for `X′` and the part of `Y` paired with it, `1` for the rest,
    /// `u8::MAX` off the pair's ground set.
    label: Vec<u8>,
    demand: Vec<u32>,
    swapped: bool,
    /// Learned weight on each vertex's pressure, raised when the pair fails there.
    boost: Vec<f64>,
}

impl PairPlan {
    fn new(hx: &BipartiteGraph, hy: &BipartiteGraph, c: usize, swapped: bool) -> Self {
        let n = hx.graph.n();
        let mut label = vec![u8::MAX; n];
        for &v in &hx.bipartition.left {
            label[v] = 0;
        }
        for &v in &hx.bipartition.right {
            label[v] = 1;
        }
        let (ya, yb) = (&hy.bipartition.left, &hy.bipartition.right);
        let (partner, rest) = if swapped { (yb, ya) } else { (ya, yb) };
        for &v in partner {
            label[v] = 0;
        }
        for &v in rest {
            label[v] = 1;
        }
        let top = hx.graph.max_degree().max(hy.graph.max_degree());
        let demand = (0..n)
            .map(|v| {
                if label[v] == u8::MAX {
                    0
                } else {
                    (c + top - hx.graph.degree(v) - hy.graph.degree(v)) as u32
                }
            })
            .collect();
        PairPlan {
            label,
            demand,
            swapped,
            boost: vec![1.0; n],
        }
    }

    fn in_quarter(&self, x: Vertex, y: Vertex) -> bool {
        self.label[x] != u8::MAX && self.label[x] == self.label[y]
    }

    /// Pool degree of each vertex inside its quarter.
    fn quarter_degrees(&self, avail: &Graph) -> Vec<u32> {
        (0..avail.n())
            .map(|v| avail.neighbors(v).iter().filter(|&&w| self.in_quarter(v, w)).count() as u32)
            .collect()
    }

    /// How hard each vertex leans on its quarter: demand over spare room.
    fn pressure(&self, avail: &Graph) -> Vec<f64> {
        self.quarter_degrees(avail)
            .into_iter()
            .zip(&self.demand)
            .zip(&self.boost)
            .map(|((q, &f), b)| if f == 0 { 0.0 } else { b * f as f64 / (q as f64 - f as f64 + 1.0).max(0.5) })
            .collect()
    }

    fn tightness(&self, avail: &Graph) -> f64 {
        self.pressure(avail).iter().map(|p| p * p).sum()
    }
}

/// Orientation choices and pressures for all pairs of one run.
pub(crate) struct Packing {
    plans: Vec<PairPlan>,
}

impl Packing {
    /// Picks for every pair the orientation whose quarters are roomier in the
    /// fresh pool. Orientations that do not match side sizes are skipped.
    pub(crate) fn plan(gxy: &BipartiteGraph, pairs: &[(BipartiteGraph, BipartiteGraph)], c: usize) -> Self {
        let plans = pairs
            .iter()
            .map(|(hx, hy)| {
                let fits = |swapped: bool| {
                    let y1 = if swapped { &hy.bipartition.right } else { &hy.bipartition.left };
                    y1.len() == hx.bipartition.left.len()
                };
                let straight = PairPlan::new(hx, hy, c, false);
                if !fits(true) {
                    return straight;
                }
                let crossed = PairPlan::new(hx, hy, c, true);
                if !fits(false) || crossed.tightness(&gxy.graph) < straight.tightness(&gxy.graph) {
                    crossed
                } else {
                    straight
                }
            })
            .collect();
        Packing { plans }
    }

    /// Doubles the weight of `vertices` in pair `j`, so that earlier pairs
    /// leave more of `j`'s quarter around them.
    pub(crate) fn bump(&mut self, j: usize, vertices: impl IntoIterator<Item = Vertex>) {
        let boost = &mut self.plans[j].boost;
        for v in vertices {
            boost[v] = (boost[v] * 2.0).min(MAX_BOOST);
        }
    }

    pub(crate) fn swap_first(&self, j: usize) -> bool {
        self.plans[j].swapped
    }

    /// Costs for pair `j`'s factor given the pool still available: an edge
    /// costs the pressure it would relieve in every later quarter holding it.
    pub(crate) fn costs_for(&self, j: usize, avail: &Graph) -> EdgeCosts<'_> {
        let later = &self.plans[j + 1..];
        let pressure = later.iter().map(|p| p.pressure(avail)).collect();
        EdgeCosts { later, pressure }
    }
}

pub(crate) struct EdgeCosts<'a> {
    later: &'a [PairPlan],
    pressure: Vec<Vec<f64>>,
}

impl EdgeCosts<'_> {
    pub(crate) fn cost(&self, x: Vertex, y: Vertex) -> i64 {
        let total: f64 = self
            .later
            .iter()
            .zip(&self.pressure)
            .filter(|(plan, _)| plan.in_quarter(x, y))
            .map(|(_, p)| p[x] + p[y])
            .sum();
        (total * COST_SCALE).round() as i64
    }
}
