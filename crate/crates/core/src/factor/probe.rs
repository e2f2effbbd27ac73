use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ffactor::{f_factor, DegreeSpec, FactorOutcome, OreCertificate};
use super::FactorError;
use crate::graph::{BipartiteGraph, Edge, Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub d: f64,
    pub rho: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeFailure {
    pub trial: usize,
    pub certificate: OreCertificate,
    /// Certificate recounted against `h ∖ F` and `f`.
    pub validated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub max_removed_degree: usize,
    pub first_failure: Option<ProbeFailure>,
}

/// Random `F ⊆ h` with `Δ(F) ≤ cap`: each edge is offered with probability
/// one half, in random order, and kept while both endpoints have room.
pub fn sample_bounded_subgraph<R: Rng + ?Sized>(h: &Graph, cap: usize, rng: &mut R) -> Graph {
    let mut edges: Vec<Edge> = h.edges().collect();
    edges.shuffle(rng);
    let mut deg = vec![0usize; h.n()];
    let mut kept = Vec::new();
    for (u, v) in edges {
        if rng.gen_bool(0.5) && deg[u] < cap && deg[v] < cap {
            deg[u] += 1;
            deg[v] += 1;
            kept.push((u, v));
        }
    }
    kept.sort_unstable();
    Graph::from_edges_trusted(h.n(), kept)
}

/// Integer `f` with values in `[(1 − γ) a, a]` where `a = α' d`, balanced so
/// that `f(X) = f(Y)` by decrementing the largest values on the heavier side.
pub fn sample_demand<R: Rng + ?Sized>(h: &BipartiteGraph, a: f64, gamma: f64, rng: &mut R) -> DegreeSpec {
    let lo = ((1.0 - gamma) * a - 1e-9).ceil().max(0.0) as usize;
    let hi = (a + 1e-9).floor() as usize;
    assert!(lo <= hi, "empty demand interval");
    let mut f = DegreeSpec::from_fn(&h.bipartition, |_| rng.gen_range(lo..=hi));
    loop {
        let (fx, fy) = f.side_sums(&h.bipartition);
        if fx == fy {
            break;
        }
        let (heavy, light): (&[Vertex], &[Vertex]) = if fx > fy {
            (h.left(), h.right())
        } else {
            (h.right(), h.left())
        };
        let top = heavy.iter().copied().filter(|&v| f.get(v) > lo).max_by_key(|&v| (f.get(v), std::cmp::Reverse(v)));
        if let Some(v) = top {
            *f.targets.get_mut(&v).unwrap() -= 1;
            continue;
        }
        let bottom = light.iter().copied().filter(|&v| f.get(v) < hi).min_by_key(|&v| (f.get(v), v));
        match bottom {
            Some(v) => *f.targets.get_mut(&v).unwrap() += 1,
            None => panic!("sides of different sizes cannot be balanced"),
        }
    }
    f
}

/// Monte Carlo test of robust matchability: each trial removes a random
/// subgraph of max degree `≤ ρd`, draws `α' ∈ [1/d, α]` and a near-constant
/// demand, and asks for a factor of what is left.
pub fn probe_robust_matchability<R: Rng + ?Sized>(
    h: &BipartiteGraph,
    params: &ProbeParams,
    rng: &mut R,
) -> Result<ProbeReport, FactorError> {
    if h.left().len() != h.right().len() {
        return Err(FactorError::NotBalanced);
    }
    let d = params.d;
    let cap = (params.rho * d + 1e-9).floor() as usize;
    let mut successes = 0;
    let mut first_failure = None;
    let mut max_removed_degree = 0;
    for trial in 0..params.trials {
        let f_graph = sample_bounded_subgraph(&h.graph, cap, rng);
        max_removed_degree = max_removed_degree.max(f_graph.max_degree());
        let rest = BipartiteGraph {
            graph: h.graph.difference(&f_graph),
            bipartition: h.bipartition.clone(),
        };
        let lo = (1.0 / d).min(params.alpha);
        let alpha_prime = if params.alpha > lo { rng.gen_range(lo..=params.alpha) } else { lo };
        let mut a = alpha_prime * d;
        if ((1.0 - params.gamma) * a - 1e-9).ceil() > (a + 1e-9).floor() {
            a = a.floor();
        }
        let f = sample_demand(&rest, a, params.gamma, rng);
        match f_factor(&rest, &f)? {
            FactorOutcome::Factor(_) => successes += 1,
            FactorOutcome::Certificate(c) => {
                if first_failure.is_none() {
                    let validated = c.is_valid_for(&rest, &f);
                    first_failure = Some(ProbeFailure {
                        trial,
                        certificate: c,
                        validated,
                    });
                }
            }
        }
    }
    Ok(ProbeReport {
        trials: params.trials,
        successes,
        success_rate: if params.trials == 0 { 1.0 } else { successes as f64 / params.trials as f64 },
        max_removed_degree,
        first_failure,
    })
}
