use serde::{Deserialize, Serialize};

use super::ffactor::{f_factor, min_cost_f_factor, DegreeSpec, FactorOutcome, OreCertificate};
use super::FactorError;
use crate::bisect::check_goodness;
use crate::graph::{BipartiteGraph, Bipartition, Graph, SpanningBipartitePiece, Vertex};
use crate::params::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizationParams {
    pub mode: Mode,
    pub rho: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Number of pairs `K` to be regularized.
    pub k: usize,
    pub d: f64,
    /// Goodness threshold checked for each bipartition.
    pub goodness: f64,
    /// Extra degree `C = ⌈(1 − γ) ρ d / K⌉` added to every merged piece.
    pub c: usize,
}

impl RegularizationParams {
    pub fn new(mode: Mode, rho: f64, alpha: f64, gamma: f64, k: usize, d: f64, goodness: f64) -> Self {
        let c = ((1.0 - gamma) * rho * d / k.max(1) as f64 - 1e-9).ceil().max(0.0) as usize;
        RegularizationParams { mode, rho, alpha, gamma, k, d, goodness, c }
    }

    /// Spread allowed for each of `hx`, `hy`: `γρd/(4K)`.
    pub fn spread_budget(&self) -> f64 {
        self.gamma * self.rho * self.d / (4.0 * self.k.max(1) as f64)
    }

    /// Max degree allowed for `r′ ∪ r″`: `ρd/K`.
    pub fn factor_degree_budget(&self) -> f64 {
        self.rho * self.d / self.k.max(1) as f64
    }

    /// `ρ/α ≤ K ≤ γρd/2`.
    pub fn k_in_range(&self) -> bool {
        let k = self.k as f64;
        self.rho / self.alpha <= k + 1e-9 && k <= self.gamma * self.rho * self.d / 2.0 + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regularized {
    pub r_prime: Graph,
    pub r_doubleprime: Graph,
    pub piece: SpanningBipartitePiece,
    pub degree: usize,
    /// Whether `X′` was paired with the right side of `hy` instead of its left.
    pub swapped: bool,
    /// Hypotheses that failed in practical mode.
    pub notes: Vec<String>,
}

/// Optional steering for [`regularize_pair_guided`]. Strict mode ignores it.
#[derive(Default, Clone, Copy)]
pub struct PairGuide<'a> {
    /// Pair `X′` with the right side of `hy` first.
    pub swap_first: bool,
    /// Cost of taking pool edge `(x, y)`, `x ∈ X`; the cheapest factor is used.
    pub edge_cost: Option<&'a dyn Fn(Vertex, Vertex) -> i64>,
}

fn sides_of(g: &BipartiteGraph) -> Vec<usize> {
    let mut v = g.bipartition.vertices();
    v.sort_unstable();
    v
}

/// Adds edges of `gxy ∖ used` to `hx ∪ hy` so that the union is regular and
/// bipartite with bipartition `{X′ ∪ Y″, X″ ∪ Y′}`.
///
/// `gxy` carries the bipartition `{X, Y}`; `hx` lives on `X` with bipartition
/// `{X′, X″}` and `hy` on `Y` with `{Y′, Y″}`. The caller adds the returned
/// `r′ ∪ r″` to `used`.
pub fn regularize_pair(
    gxy: &BipartiteGraph,
    hx: &BipartiteGraph,
    hy: &BipartiteGraph,
    used: &Graph,
    params: &RegularizationParams,
) -> Result<Regularized, FactorError> {
    regularize_pair_guided(gxy, hx, hy, used, params, PairGuide::default())
}

/// [`regularize_pair`] with a preferred orientation and edge costs. In
/// practical mode both orientations are tried when the side sizes allow it.
pub fn regularize_pair_guided(
    gxy: &BipartiteGraph,
    hx: &BipartiteGraph,
    hy: &BipartiteGraph,
    used: &Graph,
    params: &RegularizationParams,
    guide: PairGuide<'_>,
) -> Result<Regularized, FactorError> {
    let n = gxy.graph.n();
    let strict = params.mode.is_strict();
    let mut notes = Vec::new();
    let mut hypothesis = |ok: bool, msg: String| -> Result<(), FactorError> {
        match (ok, strict) {
            (true, _) => Ok(()),
            (false, true) => Err(FactorError::Hypothesis(msg)),
            (false, false) => {
                notes.push(msg);
                Ok(())
            }
        }
    };

    if sides_of(hx) != gxy.left() || sides_of(hy) != gxy.right() {
        return Err(FactorError::Hypothesis("pieces must bipartition X and Y".into()));
    }
    if hx.graph.edge_count() != hy.graph.edge_count() {
        return Err(FactorError::Hypothesis(format!(
            "(A2) edge counts differ: {} vs {}",
            hx.graph.edge_count(),
            hy.graph.edge_count()
        )));
    }
    let budget = params.spread_budget();
    for (name, h) in [("hx", hx), ("hy", hy)] {
        let vs = sides_of(h);
        let spread = h.graph.max_degree_on(&vs) - h.graph.min_degree_on(&vs);
        hypothesis(
            spread as f64 <= budget + 1e-9,
            format!("(A1) spread of {name} is {spread} > {budget:.3}"),
        )?;
    }
    for (name, h) in [("hx", hx), ("hy", hy)] {
        let bad = check_goodness(gxy, &h.bipartition, params.goodness);
        hypothesis(
            bad.is_empty(),
            format!("(A3) bipartition of {name} not good: {} violations", bad.len()),
        )?;
    }

    let (x1, x2) = (&hx.bipartition.left, &hx.bipartition.right);
    let (ya, yb) = (&hy.bipartition.left, &hy.bipartition.right);
    let mut orientations = Vec::with_capacity(2);
    for (y1, y2, swapped) in [(ya, yb, false), (yb, ya, true)] {
        if x1.len() == y1.len() && x2.len() == y2.len() {
            orientations.push((y1, y2, swapped));
        }
    }
    if orientations.is_empty() {
        return Err(FactorError::Hypothesis(format!(
            "side sizes cannot be matched: |X'|={}, |X''|={}, |Y'|={}, |Y''|={}",
            x1.len(),
            x2.len(),
            ya.len(),
            yb.len()
        )));
    }
    // Strict mode keeps the first admissible orientation only.
    if strict {
        orientations.truncate(1);
    } else if guide.swap_first {
        orientations.reverse();
    }
    let edge_cost = if strict { None } else { guide.edge_cost };

    let union = hx.graph.disjoint_union(&hy.graph).map_err(|e| FactorError::Internal(e.to_string()))?;
    let top = union.max_degree();
    let target = params.c + top;
    let demand = |v| target - union.degree(v);

    let avail = gxy.graph.difference(used);
    let solve = |a: &Vec<usize>, b: &Vec<usize>, which: &'static str| -> Result<Graph, FactorError> {
        let bp = Bipartition::new(a.clone(), b.clone()).map_err(|e| FactorError::Internal(e.to_string()))?;
        let side = crate::graph::induced_bipartite(&avail, &bp).map_err(|e| FactorError::Internal(e.to_string()))?;
        let f = DegreeSpec::from_fn(&bp, demand);
        let outcome = match edge_cost {
            Some(c) => min_cost_f_factor(&side, &f, c)?,
            None => f_factor(&side, &f)?,
        };
        match outcome {
            FactorOutcome::Factor(g) => Ok(g),
            FactorOutcome::Certificate(cert) => Err(FactorError::NoFactor {
                which,
                certificate: Box::new(cert),
            }),
        }
    };
    let mut first_err = None;
    let mut found = None;
    for (y1, y2, swapped) in orientations {
        match solve(x1, y1, "R'").and_then(|r1| Ok((r1, solve(x2, y2, "R''")?))) {
            Ok((r1, r2)) => {
                found = Some((y1, y2, swapped, r1, r2));
                break;
            }
            Err(e @ FactorError::NoFactor { .. }) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    let Some((y1, y2, swapped, r1, r2)) = found else {
        return Err(first_err.expect("at least one orientation was tried"));
    };

    let r = r1.disjoint_union(&r2).map_err(|e| FactorError::Internal(e.to_string()))?;
    let fb = params.factor_degree_budget();
    hypothesis(
        r.max_degree() as f64 <= fb + 1e-9,
        format!("max degree of R' ∪ R'' is {} > {fb:.3}", r.max_degree()),
    )?;

    let merged = union.disjoint_union(&r).map_err(|e| FactorError::Internal(e.to_string()))?;
    let left: Vec<usize> = x1.iter().chain(y2.iter()).copied().collect();
    let right: Vec<usize> = x2.iter().chain(y1.iter()).copied().collect();
    let bp = Bipartition::new(left, right).map_err(|e| FactorError::Internal(e.to_string()))?;
    let piece = SpanningBipartitePiece::new(n, bp, merged.edge_vec()).map_err(|e| FactorError::Internal(e.to_string()))?;
    if piece.degree != Some(target) {
        return Err(FactorError::Internal(format!(
            "merged piece has degree {:?}, expected {target}",
            piece.degree
        )));
    }
    Ok(Regularized {
        r_prime: r1,
        r_doubleprime: r2,
        piece,
        degree: target,
        swapped,
        notes,
    })
}

/// Whether a certificate from [`regularize_pair`] really rules out the factor.
pub fn certificate_holds(avail: &BipartiteGraph, f: &DegreeSpec, c: &OreCertificate) -> bool {
    c.is_valid_for(avail, f)
}
