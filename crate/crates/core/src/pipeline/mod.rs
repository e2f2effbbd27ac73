//! End-to-end decomposition of a regular graph into regular bipartite
//! spanning pieces.
//!
//! The run splits the vertex set into halves `X`, `Y` and keeps the crossing
//! graph `G[X, Y]` as an absorber. The graphs `G[X]` and `G[Y]` are then
//! peeled into bipartite pieces of matching edge counts, and each pair of
//! pieces is completed to a regular spanning piece with edges taken from the
//! absorber. Whatever remains of the absorber is regular and becomes the last
//! piece. Every result is checked by [`verify`] before it is returned.

mod output;
mod packing;
mod params;
mod verify;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::bisect::{
    cleanup_bisections, decompose_by_crossings, good_bisection, initial_bisection, practical_cleanup_count, BisectError,
    Cleanup, GoodBisectionParams, GoodnessParams,
};
use crate::edge_tools::{m_edge_subgraph, split_by_refinement, RefineError, SubgraphError};
use crate::factor::{one_factorize, regularize_pair_guided, FactorError, PairGuide, RegularizationParams, Regularized};
use crate::graph::{induced_bipartite, restrict_to, BipartiteGraph, Bipartition, Decomposition, Edge, Graph, SpanningBipartitePiece};
use crate::params::{Caps, Mode};
use crate::spectral;

pub use output::{DecompositionJson, PartJson};
pub use params::{strict_iterations, PipelineParams};
pub use verify::{part_bound, verify, VerificationReport};

/// Practical mode never runs more peeling iterations than this.
pub const MAX_ITERATIONS: usize = 64;

/// Regularization passes per attempt in practical mode. After a failed pass
/// the vertices of the failure certificate are priced higher and the pass
/// starts over.
const PACKING_ROUNDS: usize = 24;

/// Resample budget for a cleanup family one smaller than the default size.
const SMALL_CLEANUP_CAP: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StageError {
    #[error(transparent)]
    Bisect(#[from] BisectError),
    #[error(transparent)]
    Subgraph(#[from] SubgraphError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("{0}")]
    Invariant(String),
}

/// A failed stage, with its name and (for per-iteration stages) the iteration index.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineError {
    pub stage: &'static str,
    pub iteration: Option<usize>,
    pub source: StageError,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.iteration {
            Some(j) => write!(f, "stage {} (iteration {j}): {}", self.stage, self.source),
            None => write!(f, "stage {}: {}", self.stage, self.source),
        }
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

fn at<E: Into<StageError>>(stage: &'static str, iteration: Option<usize>) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError {
        stage,
        iteration,
        source: e.into(),
    }
}

fn invariant(stage: &'static str, iteration: Option<usize>, msg: String) -> PipelineError {
    PipelineError {
        stage,
        iteration,
        source: StageError::Invariant(msg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration: Option<usize>,
    pub detail: serde_json::Value,
}

/// Per-stage parameters, resample counts and piece summaries of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Attempt (RNG stream) that produced the result.
    pub attempt: usize,
    pub failed_attempts: Vec<String>,
    pub resamples: u64,
    pub stages: Vec<StageRecord>,
}

impl Trace {
    fn push(&mut self, stage: &str, iteration: Option<usize>, detail: serde_json::Value) {
        self.stages.push(StageRecord {
            stage: stage.to_string(),
            iteration,
            detail,
        });
    }
}

/// A verified decomposition together with how it was produced.
#[derive(Debug, Clone)]
pub struct Decomposed {
    pub n: usize,
    pub d: usize,
    pub mode: Mode,
    pub seed: u64,
    pub decomposition: Decomposition,
    pub leftover_degree: usize,
    pub report: VerificationReport,
    pub trace: Trace,
}

impl Decomposed {
    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson::from_decomposed(self)
    }
}

fn spread(g: &Graph, vs: &[usize]) -> usize {
    if vs.is_empty() {
        0
    } else {
        g.max_degree_on(vs) - g.min_degree_on(vs)
    }
}

/// Decomposes the regular graph `g` and verifies the result.
pub fn decompose(g: &Graph, params: &PipelineParams) -> Result<Decomposed, PipelineError> {
    let n = g.n();
    if n % 2 == 1 {
        return Err(at("input", None)(BisectError::OddVertexCount(n)));
    }
    let d = match g.regular_degree() {
        Some(d) => d,
        None if n == 0 => 0,
        None => return Err(invariant("input", None, "graph is not regular".into())),
    };
    if params.mode.is_strict() {
        check_strict_feasible(g, d)?;
    }
    let attempts = if params.mode.is_strict() { 1 } else { params.max_attempts.max(1) };
    let mut failures = Vec::new();
    let mut last_err = None;
    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(attempt as u64);
        let mut trace = Trace {
            attempt,
            ..Trace::default()
        };
        match run_attempt(g, d, params, &mut rng, &mut trace) {
            Ok((decomposition, leftover_degree)) => {
                let report = verify(g, &decomposition);
                if !report.all_green() {
                    return Err(invariant("verify", None, report.problems.join("; ")));
                }
                trace.failed_attempts = failures;
                return Ok(Decomposed {
                    n,
                    d,
                    mode: params.mode,
                    seed: params.seed,
                    decomposition,
                    leftover_degree,
                    report,
                    trace,
                });
            }
            Err(e) => {
                failures.push(format!("attempt {attempt}: {e}"));
                last_err = Some(e);
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn check_strict_feasible(g: &Graph, d: usize) -> Result<(), PipelineError> {
    let m = strict_iterations(d);
    if m < 1 {
        return Err(invariant(
            "parameters",
            None,
            format!("strict mode needs floor(log2 d) - 18 >= 1, i.e. d >= 2^19; got d = {d}"),
        ));
    }
    let cert = spectral::certify(g, 1.0 / 12.0)
        .map_err(|e| invariant("certify", None, e.to_string()))?;
    if !cert.satisfied {
        return Err(invariant(
            "certify",
            None,
            format!("lambda = {} exceeds d/12 = {}", cert.lambda, cert.lambda_budget),
        ));
    }
    Ok(())
}

type Pair = (BipartiteGraph, BipartiteGraph);

/// Cleanup family for one side. Without a configured `k`, practical mode
/// first tries one bipartition fewer than the default on a reduced budget,
/// since every extra bipartition adds pieces that the absorber must fill.
#[allow(clippy::too_many_arguments)]
fn cleanup_side(
    h: &BipartiteGraph,
    gx: &Graph,
    delta: usize,
    d: f64,
    goodness: &GoodnessParams,
    params: &PipelineParams,
    rng: &mut ChaCha8Rng,
    caps: Caps,
) -> Result<Cleanup, BisectError> {
    let mode = params.mode;
    if mode.is_strict() || params.cleanup_k.is_some() {
        return cleanup_bisections(h, gx, delta, d, goodness, mode, params.cleanup_k, rng, caps);
    }
    let full = practical_cleanup_count(delta);
    if full > 1 {
        let small = Caps {
            max_resamples: caps.max_resamples.min(SMALL_CLEANUP_CAP),
            ..caps
        };
        match cleanup_bisections(h, gx, delta, d, goodness, mode, Some(full - 1), rng, small) {
            Err(BisectError::ResampleCapExceeded { .. }) => {}
            other => return other,
        }
    }
    cleanup_bisections(h, gx, delta, d, goodness, mode, Some(full), rng, caps)
}

fn run_attempt(
    g: &Graph,
    d: usize,
    params: &PipelineParams,
    rng: &mut ChaCha8Rng,
    trace: &mut Trace,
) -> Result<(Decomposition, usize), PipelineError> {
    let n = g.n();
    let mode = params.mode;
    let caps = params.caps;
    let df = d as f64;
    if g.edge_count() == 0 {
        return Ok((Decomposition { host_n: n, pieces: Vec::new() }, 0));
    }

    let slack = params.slack(d);
    let init = initial_bisection(g, d, slack, rng, caps).map_err(at("initial_bisection", None))?;
    let bp = init.bipartition;
    let gxy = induced_bipartite(g, &bp).map_err(|e| invariant("initial_bisection", None, e.to_string()))?;
    let gyx = BipartiteGraph {
        graph: gxy.graph.clone(),
        bipartition: bp.swapped(),
    };
    let mut gx = restrict_to(g, &bp.left);
    let mut gy = restrict_to(g, &bp.right);
    if gx.edge_count() != gy.edge_count() {
        return Err(invariant(
            "initial_bisection",
            None,
            format!("e(G[X]) = {} differs from e(G[Y]) = {}", gx.edge_count(), gy.edge_count()),
        ));
    }
    trace.resamples += init.stats.resamples;
    trace.push(
        "initial_bisection",
        None,
        json!({
            "slack": slack,
            "sizes": [bp.left.len(), bp.right.len()],
            "edges_x": gx.edge_count(),
            "edges_y": gy.edge_count(),
            "edges_xy": gxy.graph.edge_count(),
            "stats": init.stats,
            "tightened": init.tightened,
        }),
    );

    let goodness = GoodnessParams::for_mode(mode, df, params.tolerances.goodness);
    let strict_m = strict_iterations(d);
    let mut pairs: Vec<Pair> = Vec::new();
    let mut extracted = 0usize;
    let mut j = 0usize;
    loop {
        let more = match mode {
            Mode::Strict => j < strict_m,
            Mode::Practical => {
                j < MAX_ITERATIONS && gx.max_degree().max(gy.max_degree()) > params.stop_degree
            }
        };
        if !more {
            break;
        }
        let it = Some(j + 1);
        let dj = df / 2f64.powi(j as i32 + 1);
        let eps = 40.0 * dj.powf(-1.0 / 3.0);
        let (i4_x, i4_y) = (
            out_of_window(&gx, &bp.left, dj, eps),
            out_of_window(&gy, &bp.right, dj, eps),
        );
        if mode.is_strict() && i4_x + i4_y > 0 {
            return Err(invariant("iteration", it, format!("(I4) fails at {} vertices", i4_x + i4_y)));
        }
        let gbp = GoodBisectionParams {
            mode,
            d: df,
            d_prime: dj,
            eps,
            goodness,
            concentration: params.tolerances.concentration,
        };
        let bx = good_bisection(&gxy, &gx, &gbp, rng, caps).map_err(at("good_bisection", it))?;
        let by = good_bisection(&gyx, &gy, &gbp, rng, caps).map_err(at("good_bisection", it))?;
        let m = bx.cut.edge_count().min(by.cut.edge_count());
        if m == 0 {
            return Err(invariant("m_edge_subgraph", it, "a cut graph is empty".into()));
        }
        let tx = m_edge_subgraph(&bx.cut, m).map_err(at("m_edge_subgraph", it))?;
        let ty = m_edge_subgraph(&by.cut, m).map_err(at("m_edge_subgraph", it))?;
        gx = gx.difference(&tx.kept);
        gy = gy.difference(&ty.kept);
        let (sx, sy) = (spread(&tx.kept, &bp.left), spread(&ty.kept, &bp.right));
        if mode.is_strict() {
            let cap = 70.0 * dj.powf(2.0 / 3.0);
            if sx.max(sy) as f64 > cap {
                return Err(invariant("iteration", it, format!("(I1) spread {} > {cap:.1}", sx.max(sy))));
            }
        }
        extracted += 2 * m;
        if extracted + gx.edge_count() + gy.edge_count() + gxy.graph.edge_count() != g.edge_count() {
            return Err(invariant("iteration", it, "edge conservation failed".into()));
        }
        trace.resamples += bx.split.stats.resamples + by.split.stats.resamples;
        trace.push(
            "iteration",
            it,
            json!({
                "d_j": dj,
                "eps_j": eps,
                "i4_violations": i4_x + i4_y,
                "cut_edges": [bx.cut.edge_count(), by.cut.edge_count()],
                "m": m,
                "returned": [tx.removed.edge_count(), ty.removed.edge_count()],
                "piece_max_degree": [tx.kept.max_degree(), ty.kept.max_degree()],
                "piece_spread": [sx, sy],
                "remaining_max_degree": [gx.max_degree(), gy.max_degree()],
                "stats": [bx.split.stats, by.split.stats],
                "notes": bx.notes.len() + by.notes.len(),
            }),
        );
        pairs.push((
            BipartiteGraph {
                graph: tx.kept,
                bipartition: bx.split.bipartition,
            },
            BipartiteGraph {
                graph: ty.kept,
                bipartition: by.split.bipartition,
            },
        ));
        j += 1;
    }
    let iterations = pairs.len();

    if gx.edge_count() > 0 {
        let delta = gx.max_degree().max(gy.max_degree());
        let cx = cleanup_side(&gxy, &gx, delta, df, &goodness, params, rng, caps).map_err(at("cleanup_bisections", None))?;
        let cy = cleanup_side(&gyx, &gy, delta, df, &goodness, params, rng, caps).map_err(at("cleanup_bisections", None))?;
        let px = decompose_by_crossings(&gx, &cx.bipartitions).map_err(at("decompose_by_crossings", None))?;
        let py = decompose_by_crossings(&gy, &cy.bipartitions).map_err(at("decompose_by_crossings", None))?;
        let (ax, ay) = split_by_refinement(&px, &py).map_err(at("split_by_refinement", None))?;
        trace.resamples += cx.stats.resamples + cy.stats.resamples;
        trace.push(
            "cleanup",
            None,
            json!({
                "delta": delta,
                "k": cx.bipartitions.len(),
                "piece_edges_x": px.iter().map(|p| p.graph.edge_count()).collect::<Vec<_>>(),
                "piece_edges_y": py.iter().map(|p| p.graph.edge_count()).collect::<Vec<_>>(),
                "t": ax.len(),
                "stats": [cx.stats, cy.stats],
            }),
        );
        pairs.extend(ax.into_iter().zip(ay));
    }

    let k = pairs.len();
    let rp = RegularizationParams::new(
        mode,
        params.rho,
        params.alpha,
        params.gamma,
        k.max(1),
        df,
        goodness.threshold,
    );
    if mode.is_strict() && !rp.k_in_range() {
        return Err(invariant(
            "regularize_pair",
            None,
            format!("K = {k} outside [rho/alpha, gamma rho d / 2]"),
        ));
    }
    let mut packing = (!mode.is_strict()).then(|| packing::Packing::plan(&gxy, &pairs, rp.c));
    let used_cap = mode.is_strict().then_some(params.rho * df);
    let mut rounds = 1;
    let (outs, used) = loop {
        match regularize_pass(&gxy, &pairs, &rp, packing.as_ref(), used_cap) {
            Ok(done) => break done,
            Err((i, err)) => {
                let certificate = match &err.source {
                    StageError::Factor(FactorError::NoFactor { certificate, .. }) => Some(certificate),
                    _ => None,
                };
                match (packing.as_mut(), certificate) {
                    // The first pair sees the whole pool, so repricing cannot help it.
                    (Some(p), Some(c)) if i > 0 && rounds < PACKING_ROUNDS => {
                        p.bump(i, c.s.iter().chain(&c.t_set).copied());
                        rounds += 1;
                    }
                    _ => return Err(err),
                }
            }
        }
    };
    trace.push("packing", None, json!({ "rounds": rounds }));
    let mut pieces = Vec::with_capacity(k + 1);
    for (i, (out, (hx, _))) in outs.into_iter().zip(&pairs).enumerate() {
        trace.push(
            "regularize_pair",
            Some(i + 1),
            json!({
                "kind": if i < iterations { "iteration" } else { "cleanup" },
                "degree": out.degree,
                "pair_edges": hx.graph.edge_count(),
                "absorbed_edges": out.r_prime.edge_count() + out.r_doubleprime.edge_count(),
                "swapped": out.swapped,
                "notes": out.notes.len(),
            }),
        );
        pieces.push(out.piece);
    }

    let leftover = gxy.graph.difference(&used);
    let leftover_degree = leftover
        .regular_degree()
        .ok_or_else(|| invariant("leftover", None, "leftover absorber graph is not regular".into()))?;
    if leftover_degree > 0 {
        pieces.push(
            SpanningBipartitePiece::new(n, bp.clone(), leftover.edge_vec())
                .map_err(|e| invariant("leftover", None, e.to_string()))?,
        );
    }
    trace.push(
        "leftover",
        None,
        json!({ "degree": leftover_degree, "pairs": k, "iterations": iterations, "parts": pieces.len() }),
    );
    Ok((Decomposition { host_n: n, pieces }, leftover_degree))
}

/// Regularizes every pair in order, sharing the used-edge accumulator. On
/// failure returns the index of the pair that failed.
fn regularize_pass(
    gxy: &BipartiteGraph,
    pairs: &[Pair],
    rp: &RegularizationParams,
    packing: Option<&packing::Packing>,
    used_cap: Option<f64>,
) -> Result<(Vec<Regularized>, Graph), (usize, PipelineError)> {
    let mut used = Graph::empty(gxy.graph.n());
    let mut outs = Vec::with_capacity(pairs.len());
    for (i, (hx, hy)) in pairs.iter().enumerate() {
        let it = Some(i + 1);
        let costs = packing.map(|p| p.costs_for(i, &gxy.graph.difference(&used)));
        let cost_fn = costs.as_ref().map(|c| move |x, y| c.cost(x, y));
        let guide = PairGuide {
            swap_first: packing.is_some_and(|p| p.swap_first(i)),
            edge_cost: cost_fn.as_ref().map(|f| f as &dyn Fn(usize, usize) -> i64),
        };
        let out = regularize_pair_guided(gxy, hx, hy, &used, rp, guide).map_err(|e| (i, at("regularize_pair", it)(e)))?;
        used = out
            .r_prime
            .disjoint_union(&out.r_doubleprime)
            .and_then(|r| used.disjoint_union(&r))
            .map_err(|e| (i, invariant("regularize_pair", it, e.to_string())))?;
        if let Some(cap) = used_cap {
            if used.max_degree() as f64 > cap + 1e-9 {
                let msg = format!("max degree of used edges {} exceeds rho d", used.max_degree());
                return Err((i, invariant("regularize_pair", it, msg)));
            }
        }
        outs.push(out);
    }
    Ok((outs, used))
}

/// The absorber quarter `G[X′, Y′]` seen by the first regularized pair:
/// `X, Y` from the initial bisection, then `X′` and `Y′` from one good
/// bisection of each side. Uses stream 0 of `params.seed`.
pub fn absorber_quarter(g: &Graph, params: &PipelineParams) -> Result<BipartiteGraph, PipelineError> {
    let d = g
        .regular_degree()
        .ok_or_else(|| invariant("input", None, "graph is not regular".into()))?;
    let df = d as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let init = initial_bisection(g, d, params.slack(d), &mut rng, params.caps).map_err(at("initial_bisection", None))?;
    let bp = init.bipartition;
    let gxy = induced_bipartite(g, &bp).map_err(|e| invariant("initial_bisection", None, e.to_string()))?;
    let gyx = BipartiteGraph {
        graph: gxy.graph.clone(),
        bipartition: bp.swapped(),
    };
    let dj = df / 2.0;
    let gbp = GoodBisectionParams {
        mode: params.mode,
        d: df,
        d_prime: dj,
        eps: 40.0 * dj.powf(-1.0 / 3.0),
        goodness: GoodnessParams::for_mode(params.mode, df, params.tolerances.goodness),
        concentration: params.tolerances.concentration,
    };
    let bx = good_bisection(&gxy, &restrict_to(g, &bp.left), &gbp, &mut rng, params.caps).map_err(at("good_bisection", Some(1)))?;
    let by = good_bisection(&gyx, &restrict_to(g, &bp.right), &gbp, &mut rng, params.caps).map_err(at("good_bisection", Some(1)))?;
    let x1 = bx.split.bipartition.left;
    let (ya, yb) = (by.split.bipartition.left, by.split.bipartition.right);
    let y1 = if ya.len() == x1.len() { ya } else { yb };
    let quarter = Bipartition::new(x1, y1).map_err(|e| invariant("absorber_quarter", None, e.to_string()))?;
    induced_bipartite(g, &quarter).map_err(|e| invariant("absorber_quarter", None, e.to_string()))
}

fn out_of_window(g: &Graph, vs: &[usize], dj: f64, eps: f64) -> usize {
    vs.iter()
        .filter(|&&v| (g.degree(v) as f64 - dj).abs() > eps * dj + 1e-9)
        .count()
}

/// Splits every piece of a verified decomposition into perfect matchings.
/// Returns exactly `d` pairwise disjoint perfect matchings covering `E(g)`.
pub fn one_factorization(g: &Graph, params: &PipelineParams) -> Result<(Vec<Vec<Edge>>, Decomposed), PipelineError> {
    let dec = decompose(g, params)?;
    let mut matchings = Vec::with_capacity(dec.d);
    for (i, piece) in dec.decomposition.pieces.iter().enumerate() {
        matchings.extend(one_factorize(piece).map_err(at("one_factorize", Some(i + 1)))?);
    }
    if matchings.len() != dec.d {
        return Err(invariant(
            "one_factorize",
            None,
            format!("{} matchings for a {}-regular graph", matchings.len(), dec.d),
        ));
    }
    Ok((matchings, dec))
}
