//! Min-cost flow by successive shortest paths with Johnson potentials.
//!
//! Arc costs must be non-negative when the network is built.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u64,
    cost: i64,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct CostFlowNetwork {
    arcs: Vec<Vec<Arc>>,
}

/// Handle to an arc, for reading its flow after the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostArcId {
    from: usize,
    index: usize,
}

impl CostFlowNetwork {
    pub fn new(nodes: usize) -> Self {
        CostFlowNetwork {
            arcs: vec![Vec::new(); nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64, cost: i64) -> CostArcId {
        assert!(cost >= 0, "arc costs must be non-negative");
        assert_ne!(from, to);
        let index = self.arcs[from].len();
        let back = self.arcs[to].len();
        self.arcs[from].push(Arc { to, cap, cost, rev: back });
        self.arcs[to].push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
            rev: index,
        });
        CostArcId { from, index }
    }

    pub fn flow(&self, id: CostArcId) -> u64 {
        let a = &self.arcs[id.from][id.index];
        self.arcs[a.to][a.rev].cap
    }

    /// Sends up to `limit` units from `s` to `t` at minimum total cost.
    /// Returns `(flow, cost)`.
    pub fn min_cost_flow(&mut self, s: usize, t: usize, limit: u64) -> (u64, i64) {
        let n = self.arcs.len();
        let mut potential = vec![0i64; n];
        let (mut flow, mut cost) = (0u64, 0i64);
        let mut dist = vec![i64::MAX; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        while flow < limit {
            dist.iter_mut().for_each(|d| *d = i64::MAX);
            prev.iter_mut().for_each(|p| *p = None);
            dist[s] = 0;
            let mut heap = BinaryHeap::from([Reverse((0i64, s))]);
            while let Some(Reverse((du, u))) = heap.pop() {
                if du > dist[u] {
                    continue;
                }
                for (i, a) in self.arcs[u].iter().enumerate() {
                    if a.cap == 0 {
                        continue;
                    }
                    let nd = du + a.cost + potential[u] - potential[a.to];
                    if nd < dist[a.to] {
                        dist[a.to] = nd;
                        prev[a.to] = Some((u, i));
                        heap.push(Reverse((nd, a.to)));
                    }
                }
            }
            if dist[t] == i64::MAX {
                break;
            }
            for v in 0..n {
                if dist[v] != i64::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut push = limit - flow;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                push = push.min(self.arcs[u][i].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                let rev = self.arcs[u][i].rev;
                self.arcs[u][i].cap -= push;
                self.arcs[v][rev].cap += push;
                cost += push as i64 * self.arcs[u][i].cost;
                v = u;
            }
            flow += push;
        }
        (flow, cost)
    }
}
