//! Random bisections with locally enforced guarantees.
//!
//! Every operation here draws one fair bit per matching pair (per bipartition),
//! checks a family of bad events, and resamples the variables of the first
//! violated event until the family is clear or the resample cap is reached.
//! Nothing returned by these functions is trusted downstream: callers recount.

mod engine;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use engine::{BisectionPlan, Pairing, ResampleStats};
use engine::{Engine, EventSpec, WindowScore};

use crate::graph::{BipartiteGraph, Bipartition, Graph, Vertex};
use crate::params::{Caps, Mode, Narrowing};

/// Passes allowed for the tightening step.
const TIGHTEN_PASSES: usize = 64;

/// Resamples given to plain resampling before local repair takes over.
pub const REPAIR_AFTER: u64 = 10_000;
/// Probability of a random flip during local repair.
const REPAIR_NOISE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BadEventKind {
    DegreeConcentration,
    Goodness,
    UncrossedEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Vertex(Vertex),
    Edge(Vertex, Vertex),
    /// The size-balance condition of a bipartition.
    Sizes,
}

/// A checked event with its observed value and admissible interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadEventReport {
    pub kind: BadEventKind,
    pub subject: Subject,
    pub observed: i64,
    pub lower: f64,
    /// `None` means unbounded above.
    pub upper: Option<f64>,
}

impl BadEventReport {
    pub fn is_violated(&self) -> bool {
        self.excess() > 1e-9
    }

    /// Distance of `observed` outside `[lower, upper]`, zero inside.
    pub fn excess(&self) -> f64 {
        let x = self.observed as f64;
        let below = self.lower - x;
        let above = self.upper.map_or(f64::NEG_INFINITY, |u| x - u);
        below.max(above).max(0.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BisectError {
    #[error("graph has an odd number of vertices ({0})")]
    OddVertexCount(usize),
    #[error("graph is not {0}-regular")]
    NotRegular(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resample cap {cap} exceeded after {} resamples; worst event {worst:?}", stats.resamples)]
    ResampleCapExceeded {
        cap: u64,
        stats: ResampleStats,
        worst: Box<BadEventReport>,
    },
    #[error("edge ({0}, {1}) crosses none of the bipartitions")]
    UncoveredEdge(Vertex, Vertex),
}

/// Goodness threshold: each opposite-side vertex must keep at least this many
/// neighbors in both halves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessParams {
    pub d: f64,
    pub threshold: f64,
}

impl GoodnessParams {
    /// `d / 5`, compared as a real.
    pub fn strict(d: f64) -> Self {
        GoodnessParams { d, threshold: d / 5.0 }
    }

    /// `floor(multiplier * d / 5)`.
    pub fn practical(d: f64, multiplier: f64) -> Self {
        GoodnessParams {
            d,
            threshold: (multiplier * d / 5.0).floor().max(0.0),
        }
    }

    pub fn for_mode(mode: Mode, d: f64, multiplier: f64) -> Self {
        match mode {
            Mode::Strict => Self::strict(d),
            Mode::Practical => Self::practical(d, multiplier),
        }
    }
}

/// Result of a single-bipartition split.
#[derive(Debug, Clone)]
pub struct Split {
    pub bipartition: Bipartition,
    pub plan: BisectionPlan,
    pub stats: ResampleStats,
    /// Flips accepted by the tightening step.
    pub tightened: usize,
}

fn neighbors_in(g: &Graph, v: Vertex, mask: &[bool]) -> Vec<Vertex> {
    g.neighbors(v).iter().copied().filter(|&w| mask[w]).collect()
}

fn mask(n: usize, vs: &[Vertex]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in vs {
        m[v] = true;
    }
    m
}

fn goodness_events(h: &Graph, opposite: &[Vertex], side_mask: &[bool], j: usize, threshold: f64) -> Vec<(Vertex, EventSpec)> {
    opposite
        .iter()
        .map(|&y| {
            (
                y,
                EventSpec::Goodness {
                    center: y,
                    j,
                    members: neighbors_in(h, y, side_mask),
                    threshold,
                },
            )
        })
        .collect()
}

fn solve<R: Rng + ?Sized>(engine: &mut Engine, rng: &mut R, caps: Caps) -> Result<(), BisectError> {
    engine.randomize(rng);
    if !caps.repair {
        return engine.run(rng, caps.max_resamples);
    }
    match engine.run(rng, caps.max_resamples.min(REPAIR_AFTER)) {
        Err(BisectError::ResampleCapExceeded { .. }) if caps.max_resamples > REPAIR_AFTER => {
            engine.repair(rng, caps.max_resamples, REPAIR_NOISE)
        }
        other => other,
    }
}

fn finish_split<R: Rng + ?Sized>(mut engine: Engine, rng: &mut R, caps: Caps) -> Result<Split, BisectError> {
    solve(&mut engine, rng, caps)?;
    if caps.narrow_budget > 0 {
        engine.narrow(rng, caps.narrow_budget, REPAIR_NOISE);
    }
    let tightened = if caps.tighten { engine.tighten(TIGHTEN_PASSES) } else { 0 };
    engine.release_limit();
    let bipartition = engine.plan().bipartition(0);
    let (plan, stats) = engine.into_plan();
    Ok(Split {
        bipartition,
        plan,
        stats,
        tightened,
    })
}

/// Balanced bipartition `{X, Y}` of a `d`-regular graph with
/// `|N(v) ∩ X| ∈ d/2 ± slack` for every vertex `v`.
///
/// This bounds the degrees of `G[X]`, `G[Y]` and `G[X, Y]` simultaneously,
/// since for `v ∈ X` the `G[X]`-degree is `|N(v) ∩ X|` and the cut degree is
/// `d - |N(v) ∩ X|`.
pub fn initial_bisection<R: Rng + ?Sized>(
    g: &Graph,
    d: usize,
    slack: f64,
    rng: &mut R,
    caps: Caps,
) -> Result<Split, BisectError> {
    let n = g.n();
    if n % 2 == 1 {
        return Err(BisectError::OddVertexCount(n));
    }
    if g.regular_degree() != Some(d) && n > 0 {
        return Err(BisectError::NotRegular(d));
    }
    let half = d as f64 / 2.0;
    let score = match caps.narrowing {
        Narrowing::Deviation => WindowScore::Deviation,
        Narrowing::Larger => WindowScore::Own,
    };
    let events = (0..n)
        .map(|v| EventSpec::Window {
            center: v,
            j: 0,
            members: g.neighbors(v).to_vec(),
            lo: half - slack,
            hi: half + slack,
            center2: d as i64,
            cut: false,
            score,
            kind: BadEventKind::DegreeConcentration,
        })
        .collect();
    let ground: Vec<Vertex> = (0..n).collect();
    finish_split(Engine::new(n, &ground, 1, events), rng, caps)
}

/// Parameters of [`good_bisection`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodBisectionParams {
    pub mode: Mode,
    /// Host degree parameter `d`.
    pub d: f64,
    /// Target degree `d'` of the graph being split.
    pub d_prime: f64,
    pub eps: f64,
    pub goodness: GoodnessParams,
    /// Multiplier on the cut-degree tolerance (1 in strict mode).
    pub concentration: f64,
}

impl GoodBisectionParams {
    /// Relative cut-degree tolerance `2 * concentration / d'^(1/3)`.
    pub fn tolerance(&self) -> f64 {
        let c = if self.mode.is_strict() { 1.0 } else { self.concentration };
        2.0 * c / self.d_prime.max(f64::MIN_POSITIVE).cbrt()
    }
}

#[derive(Debug, Clone)]
pub struct GoodBisection {
    pub split: Split,
    /// `gx[X', X'']`, in host labels.
    pub cut: Graph,
    /// Precondition misses recorded in practical mode.
    pub notes: Vec<String>,
}

/// Splits the left side `X` of `h` so that every `G_X`-degree is nearly halved
/// across the split and the split is good with respect to `h`.
pub fn good_bisection<R: Rng + ?Sized>(
    h: &BipartiteGraph,
    gx: &Graph,
    params: &GoodBisectionParams,
    rng: &mut R,
    caps: Caps,
) -> Result<GoodBisection, BisectError> {
    let n = h.graph.n();
    let x = h.left();
    let y = h.right();
    let x_mask = mask(n, x);
    let mut notes = Vec::new();
    let mut require = |ok: bool, msg: String| -> Result<(), BisectError> {
        if ok {
            Ok(())
        } else if params.mode.is_strict() {
            Err(BisectError::Precondition(msg))
        } else {
            notes.push(msg);
            Ok(())
        }
    };
    let d = params.d;
    let dp = params.d_prime;
    require(
        (2f64.powi(18)..=d).contains(&dp),
        format!("d' = {dp} outside [2^18, d = {d}]"),
    )?;
    require(params.eps > 0.0 && params.eps <= 0.625, format!("eps = {} outside (0, 5/8]", params.eps))?;
    let window = d.powf(2.0 / 3.0);
    let bad_h = x
        .iter()
        .chain(y)
        .find(|&&v| (h.graph.degree(v) as f64 - d / 2.0).abs() > window + 1e-9);
    require(
        bad_h.is_none(),
        format!("host degree outside d/2 ± d^(2/3) at vertex {:?}", bad_h),
    )?;
    let bad_gx = x.iter().find(|&&v| {
        let deg = gx.degree(v) as f64;
        (deg - dp).abs() > params.eps * dp + 1e-9
    });
    require(
        bad_gx.is_none(),
        format!("G_X degree outside (1 ± eps) d' at vertex {:?}", bad_gx),
    )?;
    if let Some((u, v)) = gx.edges().find(|&(u, v)| !x_mask[u] || !x_mask[v]) {
        return Err(BisectError::Precondition(format!("edge ({u}, {v}) of G_X leaves X")));
    }

    let tol = params.tolerance();
    let score = match caps.narrowing {
        Narrowing::Deviation => WindowScore::Deviation,
        Narrowing::Larger => WindowScore::Larger,
    };
    let mut keyed: Vec<(Vertex, EventSpec)> = x
        .iter()
        .map(|&v| {
            let deg = gx.degree(v) as f64;
            let (lo, hi) = ((1.0 - tol) * deg / 2.0, (1.0 + tol) * deg / 2.0);
            (
                v,
                EventSpec::Window {
                    center: v,
                    j: 0,
                    members: gx.neighbors(v).to_vec(),
                    lo,
                    hi,
                    center2: gx.degree(v) as i64,
                    cut: true,
                    score,
                    kind: BadEventKind::DegreeConcentration,
                },
            )
        })
        .collect();
    keyed.extend(goodness_events(&h.graph, y, &x_mask, 0, params.goodness.threshold));
    keyed.sort_by_key(|(v, _)| *v);
    let events = keyed.into_iter().map(|(_, e)| e).collect();
    let split = finish_split(Engine::new(n, x, 1, events), rng, caps)?;
    let sides = split.bipartition.sides(n);
    let cut = gx.filter_edges(|u, v| sides[u] != sides[v]);
    Ok(GoodBisection { split, cut, notes })
}

/// Number of cleanup bipartitions, `ceil(log2 Delta) + 8`.
pub fn cleanup_count(delta: usize) -> usize {
    ceil_log2(delta.max(1)) + 8
}

/// Default for practical mode: `ceil(log2(Delta + 1))`, the fewest splits
/// that can separate a proper `(Delta + 1)`-coloring.
pub fn practical_cleanup_count(delta: usize) -> usize {
    ceil_log2(delta + 1).max(1)
}

fn ceil_log2(x: usize) -> usize {
    debug_assert!(x >= 1);
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

#[derive(Debug, Clone)]
pub struct Cleanup {
    pub bipartitions: Vec<Bipartition>,
    pub plan: BisectionPlan,
    pub stats: ResampleStats,
}

/// `k` bipartitions of `X` such that every edge of `gx` crosses at least one
/// and each is good with respect to `h`. In strict mode `k` is forced to
/// [`cleanup_count`]`(delta)`.
#[allow(clippy::too_many_arguments)]
pub fn cleanup_bisections<R: Rng + ?Sized>(
    h: &BipartiteGraph,
    gx: &Graph,
    delta: usize,
    d: f64,
    goodness: &GoodnessParams,
    mode: Mode,
    k: Option<usize>,
    rng: &mut R,
    caps: Caps,
) -> Result<Cleanup, BisectError> {
    let n = h.graph.n();
    let x = h.left();
    let y = h.right();
    if gx.max_degree() > delta {
        return Err(BisectError::Precondition(format!(
            "max degree {} of G_X exceeds Delta = {delta}",
            gx.max_degree()
        )));
    }
    if delta < 1 || delta as f64 > d {
        return Err(BisectError::Precondition(format!("Delta = {delta} outside [1, d = {d}]")));
    }
    let k = match (mode, k) {
        (Mode::Strict, _) => cleanup_count(delta),
        (Mode::Practical, Some(k)) if k >= 1 => k,
        (Mode::Practical, Some(_)) => {
            return Err(BisectError::Precondition("cleanup needs k >= 1".into()))
        }
        (Mode::Practical, None) => practical_cleanup_count(delta),
    };
    let x_mask = mask(n, x);
    let mut events: Vec<(Vertex, usize, EventSpec)> = Vec::new();
    for j in 0..k {
        for (yv, ev) in goodness_events(&h.graph, y, &x_mask, j, goodness.threshold) {
            events.push((yv, j, ev));
        }
    }
    events.sort_by_key(|(v, j, _)| (*v, *j));
    let mut specs: Vec<EventSpec> = events.into_iter().map(|(_, _, e)| e).collect();
    for (u, v) in gx.edges() {
        if !x_mask[u] || !x_mask[v] {
            return Err(BisectError::Precondition(format!("edge ({u}, {v}) of G_X leaves X")));
        }
        specs.push(EventSpec::Crossing { u, v });
    }
    let mut engine = Engine::new(n, x, k, specs);
    solve(&mut engine, rng, caps)?;
    let (plan, stats) = engine.into_plan();
    Ok(Cleanup {
        bipartitions: plan.bipartitions(),
        plan,
        stats,
    })
}

/// Assigns every edge of `gx` to the first bipartition it crosses.
pub fn decompose_by_crossings(gx: &Graph, bps: &[Bipartition]) -> Result<Vec<BipartiteGraph>, BisectError> {
    let n = gx.n();
    let sides: Vec<_> = bps.iter().map(|bp| bp.sides(n)).collect();
    let mut buckets: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); bps.len()];
    for (u, v) in gx.edges() {
        let j = sides
            .iter()
            .position(|s| matches!((s[u], s[v]), (Some(a), Some(b)) if a != b))
            .ok_or(BisectError::UncoveredEdge(u, v))?;
        buckets[j].push((u, v));
    }
    Ok(buckets
        .into_iter()
        .zip(bps)
        .map(|(edges, bp)| BipartiteGraph {
            graph: Graph::from_edges_trusted(n, edges),
            bipartition: bp.clone(),
        })
        .collect())
}

/// Reports every failure of the size condition and of the two-sided
/// neighbor threshold for a bipartition of one side of `h`.
pub fn check_goodness(h: &BipartiteGraph, bp: &Bipartition, threshold: f64) -> Vec<BadEventReport> {
    let n = h.graph.n();
    let split_side = bp.vertices();
    let opposite: &[Vertex] = if split_side == h.bipartition.left {
        &h.bipartition.right
    } else {
        &h.bipartition.left
    };
    let mut reports = Vec::new();
    let diff = bp.left.len() as i64 - bp.right.len() as i64;
    if diff.abs() > 1 {
        reports.push(BadEventReport {
            kind: BadEventKind::Goodness,
            subject: Subject::Sizes,
            observed: diff,
            lower: -1.0,
            upper: Some(1.0),
        });
    }
    let sides = bp.sides(n);
    for &yv in opposite {
        let (mut l, mut r) = (0i64, 0i64);
        for &w in h.graph.neighbors(yv) {
            match sides[w] {
                Some(crate::graph::Side::Left) => l += 1,
                Some(crate::graph::Side::Right) => r += 1,
                None => {}
            }
        }
        let report = BadEventReport {
            kind: BadEventKind::Goodness,
            subject: Subject::Vertex(yv),
            observed: l.min(r),
            lower: threshold,
            upper: None,
        };
        if report.is_violated() {
            reports.push(report);
        }
    }
    reports
}
