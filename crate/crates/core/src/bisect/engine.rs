//! Moser–Tardos resampling over matching-pair decisions.
//!
//! The ground set is paired canonically as `(g[0], g[1]), (g[2], g[3]), ...`
//! with a dummy partner for the last vertex when the ground set is odd. Each of
//! `k` bipartitions owns one independent bit per pair deciding which endpoint
//! goes left. Bad events are evaluated incrementally from per-event counters.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BadEventKind, BadEventReport, BisectError, Subject};
use crate::graph::{Bipartition, Vertex};

const NONE: usize = usize::MAX;
const FLOAT_SLACK: f64 = 1e-9;

/// Counters reported by every resampling run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResampleStats {
    pub events_checked: u64,
    pub resamples: u64,
    pub violations_final: u64,
}

impl ResampleStats {
    pub fn absorb(&mut self, other: ResampleStats) {
        self.events_checked += other.events_checked;
        self.resamples += other.resamples;
        self.violations_final += other.violations_final;
    }
}

/// Perfect matching on the ground set, plus an optional dummy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub ground: Vec<Vertex>,
    /// `(first, second)`; `second` is `None` when paired with the dummy.
    pub pairs: Vec<(Vertex, Option<Vertex>)>,
}

impl Pairing {
    pub fn canonical(ground: &[Vertex]) -> Pairing {
        let mut ground = ground.to_vec();
        ground.sort_unstable();
        ground.dedup();
        let pairs = ground
            .chunks(2)
            .map(|c| (c[0], c.get(1).copied()))
            .collect();
        Pairing { ground, pairs }
    }

    pub fn has_dummy(&self) -> bool {
        self.ground.len() % 2 == 1
    }
}

/// A split plan: the pairing and one decision bit per pair and bipartition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisectionPlan {
    pub pairing: Pairing,
    /// `decisions[j][i]` is true when pair `i`'s first endpoint is left in bipartition `j`.
    pub decisions: Vec<Vec<bool>>,
}

impl BisectionPlan {
    pub fn bipartition(&self, j: usize) -> Bipartition {
        let mut left = Vec::with_capacity(self.pairing.ground.len() / 2 + 1);
        let mut right = Vec::with_capacity(self.pairing.ground.len() / 2 + 1);
        for (i, &(a, b)) in self.pairing.pairs.iter().enumerate() {
            let (l, r) = if self.decisions[j][i] { (Some(a), b) } else { (b, Some(a)) };
            left.extend(l);
            right.extend(r);
        }
        Bipartition::new(left, right).expect("pairing sides are disjoint")
    }

    pub fn bipartitions(&self) -> Vec<Bipartition> {
        (0..self.decisions.len()).map(|j| self.bipartition(j)).collect()
    }
}

#[derive(Debug, Clone)]
pub(crate) enum EventSpec {
    /// `|members ∩ left_j|` must lie in `[lo, hi]`; `center2` is twice the
    /// target. With `cut` set the observed value is instead the number of
    /// members on the side opposite to `center`. `score` is what narrowing
    /// bounds.
    Window {
        center: Vertex,
        j: usize,
        members: Vec<Vertex>,
        lo: f64,
        hi: f64,
        center2: i64,
        cut: bool,
        score: WindowScore,
        kind: BadEventKind,
    },
    /// Both `|members ∩ left_j|` and `|members ∩ right_j|` must be `>= threshold`.
    Goodness {
        center: Vertex,
        j: usize,
        members: Vec<Vertex>,
        threshold: f64,
    },
    /// Edge must cross at least one bipartition.
    Crossing { u: Vertex, v: Vertex },
}

/// Quantity of a window event that narrowing drives down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WindowScore {
    /// `|2 * value - center2|`.
    Deviation,
    /// `max(cut, |members| - cut)`, where `cut` counts members opposite to the center.
    Larger,
    /// Members on the center's own side.
    Own,
}

pub(crate) struct Engine {
    plan: BisectionPlan,
    k: usize,
    pair_of: Vec<usize>,
    is_first: Vec<bool>,
    events: Vec<EventSpec>,
    scopes: Vec<Vec<(usize, usize)>>,
    watchers: Vec<Vec<usize>>,
    edge_watchers: Vec<Vec<usize>>,
    /// Cut windows centered at each vertex.
    center_watchers: Vec<Vec<usize>>,
    counts: Vec<i64>,
    violated: BTreeSet<usize>,
    /// Extra cap on the score of every window event, used while narrowing.
    limit: Option<i64>,
    pub stats: ResampleStats,
}

impl Engine {
    /// `n` bounds every vertex label appearing in the ground set or events.
    pub fn new(n: usize, ground: &[Vertex], k: usize, events: Vec<EventSpec>) -> Engine {
        let pairing = Pairing::canonical(ground);
        let mut pair_of = vec![NONE; n];
        let mut is_first = vec![false; n];
        for (i, &(a, b)) in pairing.pairs.iter().enumerate() {
            pair_of[a] = i;
            is_first[a] = true;
            if let Some(b) = b {
                pair_of[b] = i;
            }
        }
        let mut watchers = vec![Vec::new(); n];
        let mut edge_watchers = vec![Vec::new(); n];
        let mut center_watchers = vec![Vec::new(); n];
        let mut scopes = Vec::with_capacity(events.len());
        for (e, ev) in events.iter().enumerate() {
            match ev {
                EventSpec::Window { j, members, .. } | EventSpec::Goodness { j, members, .. } => {
                    let mut hits = vec![];
                    for &w in members {
                        watchers[w].push(e);
                        hits.push(pair_of[w]);
                    }
                    hits.sort_unstable();
                    // Pairs with both endpoints inside contribute a constant.
                    let mut scope = Vec::new();
                    let mut i = 0;
                    while i < hits.len() {
                        if i + 1 < hits.len() && hits[i + 1] == hits[i] {
                            i += 2;
                        } else {
                            scope.push((*j, hits[i]));
                            i += 1;
                        }
                    }
                    if let EventSpec::Window { center, cut, score, .. } = ev {
                        if !*cut && *score == WindowScore::Deviation {
                            scopes.push(scope);
                            continue;
                        }
                        center_watchers[*center].push(e);
                        let own = (*j, pair_of[*center]);
                        if !scope.contains(&own) {
                            scope.push(own);
                            scope.sort_unstable();
                        }
                    }
                    scopes.push(scope);
                }
                EventSpec::Crossing { u, v } => {
                    edge_watchers[*u].push(e);
                    edge_watchers[*v].push(e);
                    let (pu, pv) = (pair_of[*u], pair_of[*v]);
                    let mut scope = Vec::new();
                    if pu != pv {
                        for j in 0..k {
                            scope.push((j, pu.min(pv)));
                            scope.push((j, pu.max(pv)));
                        }
                        scope.sort_unstable();
                    }
                    scopes.push(scope);
                }
            }
        }
        let decisions = vec![vec![false; pairing.pairs.len()]; k];
        Engine {
            plan: BisectionPlan { pairing, decisions },
            k,
            pair_of,
            is_first,
            counts: vec![0; events.len()],
            events,
            scopes,
            watchers,
            edge_watchers,
            center_watchers,
            violated: BTreeSet::new(),
            limit: None,
            stats: ResampleStats::default(),
        }
    }

    #[inline]
    fn is_left(&self, j: usize, v: Vertex) -> bool {
        self.plan.decisions[j][self.pair_of[v]] == self.is_first[v]
    }

    fn recount(&mut self, e: usize) {
        self.counts[e] = match &self.events[e] {
            EventSpec::Window { j, members, .. } | EventSpec::Goodness { j, members, .. } => {
                members.iter().filter(|&&w| self.is_left(*j, w)).count() as i64
            }
            EventSpec::Crossing { u, v } => (0..self.k)
                .filter(|&j| self.is_left(j, *u) != self.is_left(j, *v))
                .count() as i64,
        };
    }

    /// Observed value of event `e`: the maintained count, or the cut degree
    /// for cut windows.
    fn value(&self, e: usize) -> i64 {
        match &self.events[e] {
            EventSpec::Window {
                center,
                j,
                members,
                cut: true,
                ..
            } if self.is_left(*j, *center) => members.len() as i64 - self.counts[e],
            _ => self.counts[e],
        }
    }

    /// Narrowing score of window event `e`, `None` for other events.
    fn score(&self, e: usize) -> Option<i64> {
        let EventSpec::Window {
            center,
            j,
            members,
            center2,
            cut,
            score,
            ..
        } = &self.events[e]
        else {
            return None;
        };
        let m = members.len() as i64;
        let c = self.counts[e];
        let across = if self.is_left(*j, *center) { m - c } else { c };
        Some(match score {
            WindowScore::Deviation => {
                let v = if *cut { across } else { c };
                (2 * v - center2).abs()
            }
            WindowScore::Larger => across.max(m - across),
            WindowScore::Own => m - across,
        })
    }

    fn is_violated(&self, e: usize) -> bool {
        let c = self.value(e);
        match &self.events[e] {
            EventSpec::Window { lo, hi, .. } => {
                (c as f64) < lo - FLOAT_SLACK
                    || (c as f64) > hi + FLOAT_SLACK
                    || self.limit.is_some_and(|l| self.score(e).is_some_and(|s| s > l))
            }
            EventSpec::Goodness { members, threshold, .. } => {
                let right = members.len() as i64 - c;
                (c.min(right) as f64) < threshold - FLOAT_SLACK
            }
            EventSpec::Crossing { u, v } => self.pair_of[*u] != self.pair_of[*v] && c == 0,
        }
    }

    fn refresh(&mut self, e: usize) {
        self.stats.events_checked += 1;
        if self.is_violated(e) {
            self.violated.insert(e);
        } else {
            self.violated.remove(&e);
        }
    }

    fn objective_term(&self, e: usize) -> i64 {
        match &self.events[e] {
            EventSpec::Window { center2, .. } => {
                let dev = 2 * self.value(e) - center2;
                dev * dev
            }
            _ => 0,
        }
    }

    /// Flips pair `i` in bipartition `j`; returns the events whose counters moved.
    fn flip(&mut self, j: usize, i: usize, touched: &mut Vec<usize>) {
        touched.clear();
        let (a, b) = self.plan.pairing.pairs[i];
        let movers = [Some(a), b];
        for w in movers.into_iter().flatten() {
            touched.extend(self.edge_watchers[w].iter().copied());
        }
        touched.sort_unstable();
        touched.dedup();
        let crossing_before: Vec<bool> = touched
            .iter()
            .map(|&e| match self.events[e] {
                EventSpec::Crossing { u, v } => self.is_left(j, u) != self.is_left(j, v),
                _ => unreachable!(),
            })
            .collect();
        self.plan.decisions[j][i] = !self.plan.decisions[j][i];
        for (idx, &e) in touched.iter().enumerate() {
            if let EventSpec::Crossing { u, v } = self.events[e] {
                let now = self.is_left(j, u) != self.is_left(j, v);
                self.counts[e] += now as i64 - crossing_before[idx] as i64;
            }
        }
        for w in movers.into_iter().flatten() {
            let delta = if self.is_left(j, w) { 1 } else { -1 };
            for &e in &self.watchers[w] {
                let ej = match &self.events[e] {
                    EventSpec::Window { j, .. } | EventSpec::Goodness { j, .. } => *j,
                    EventSpec::Crossing { .. } => unreachable!(),
                };
                if ej == j {
                    self.counts[e] += delta;
                    touched.push(e);
                }
            }
            for &e in &self.center_watchers[w] {
                if matches!(self.events[e], EventSpec::Window { j: ej, .. } if ej == j) {
                    touched.push(e);
                }
            }
        }
        touched.sort_unstable();
        touched.dedup();
    }

    pub fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for j in 0..self.k {
            for i in 0..self.plan.decisions[j].len() {
                self.plan.decisions[j][i] = rng.gen::<bool>();
            }
        }
        self.recount_all();
    }

    fn recount_all(&mut self) {
        self.violated.clear();
        for e in 0..self.events.len() {
            self.recount(e);
            self.refresh(e);
        }
    }

    fn window_score(&self) -> i64 {
        (0..self.events.len()).filter_map(|e| self.score(e)).max().unwrap_or(0)
    }

    /// Starting from a violation-free state, repeatedly caps every window
    /// score at `L` for decreasing `L` and repairs from the
    /// current assignment with at most `budget` steps per level. Keeps the
    /// last level that was reached, leaves it in force (see
    /// [`Engine::release_limit`]) and returns it.
    pub fn narrow<R: Rng + ?Sized>(&mut self, rng: &mut R, budget: u64, noise: f64) -> i64 {
        debug_assert!(self.violated.is_empty());
        let mut level = self.window_score();
        let mut saved = self.plan.decisions.clone();
        while level > 0 {
            self.limit = Some(level - 1);
            self.recount_all();
            let cap = self.stats.resamples + budget;
            if self.repair(rng, cap, noise).is_err() {
                self.plan.decisions = saved;
                break;
            }
            level = self.window_score();
            saved = self.plan.decisions.clone();
        }
        self.limit = Some(level);
        self.recount_all();
        self.stats.violations_final = 0;
        debug_assert!(self.violated.is_empty());
        level
    }

    pub fn release_limit(&mut self) {
        self.limit = None;
        self.recount_all();
    }

    /// Resamples the first violated event (canonical order) until none remain.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, max_resamples: u64) -> Result<(), BisectError> {
        let mut touched = Vec::new();
        while let Some(&e) = self.violated.first() {
            if self.stats.resamples >= max_resamples {
                return Err(self.cap_error(max_resamples));
            }
            self.stats.resamples += 1;
            for s in 0..self.scopes[e].len() {
                let (j, i) = self.scopes[e][s];
                let bit = rng.gen::<bool>();
                if bit != self.plan.decisions[j][i] {
                    self.flip(j, i, &mut touched);
                    for t in 0..touched.len() {
                        self.refresh(touched[t]);
                    }
                }
            }
        }
        self.stats.violations_final = 0;
        Ok(())
    }

    /// Focused local search: pick a random violated event and flip the pair
    /// in its scope that most lowers the total excess over all events, or a
    /// random scope pair with probability `noise`. Each step counts as one
    /// resample against `max_resamples`.
    pub fn repair<R: Rng + ?Sized>(&mut self, rng: &mut R, max_resamples: u64, noise: f64) -> Result<(), BisectError> {
        let mut touched = Vec::new();
        while !self.violated.is_empty() {
            if self.stats.resamples >= max_resamples {
                return Err(self.cap_error(max_resamples));
            }
            self.stats.resamples += 1;
            let pick = rng.gen_range(0..self.violated.len());
            let e = *self.violated.iter().nth(pick).expect("index in range");
            let scope_len = self.scopes[e].len();
            if scope_len == 0 {
                // No variable can change this event.
                return Err(self.cap_error(max_resamples));
            }
            let choice = if rng.gen_bool(noise) {
                rng.gen_range(0..scope_len)
            } else {
                let mut best = (f64::INFINITY, 0);
                for s in 0..scope_len {
                    let (j, i) = self.scopes[e][s];
                    self.flip(j, i, &mut touched);
                    let after: f64 = touched.iter().map(|&t| self.excess(t)).sum();
                    self.flip(j, i, &mut touched);
                    let before: f64 = touched.iter().map(|&t| self.excess(t)).sum();
                    if after - before < best.0 {
                        best = (after - before, s);
                    }
                }
                best.1
            };
            let (j, i) = self.scopes[e][choice];
            self.flip(j, i, &mut touched);
            for t in 0..touched.len() {
                self.refresh(touched[t]);
            }
        }
        self.stats.violations_final = 0;
        Ok(())
    }

    fn excess(&self, e: usize) -> f64 {
        if self.is_violated(e) {
            self.report(e).excess().max(1.0)
        } else {
            0.0
        }
    }

    fn cap_error(&mut self, cap: u64) -> BisectError {
        self.stats.violations_final = self.violated.len() as u64;
        BisectError::ResampleCapExceeded {
            cap,
            stats: self.stats,
            worst: Box::new(self.worst_report()),
        }
    }

    /// Greedy single-pair flips that strictly lower the squared deviation of
    /// window counters from their centers and never create a violation.
    pub fn tighten(&mut self, max_passes: usize) -> usize {
        debug_assert!(self.violated.is_empty());
        let mut touched = Vec::new();
        let mut accepted = 0;
        for _ in 0..max_passes {
            let mut improved = false;
            for j in 0..self.k {
                for i in 0..self.plan.pairing.pairs.len() {
                    let (a, b) = self.plan.pairing.pairs[i];
                    let mut affected: Vec<usize> = [Some(a), b]
                        .into_iter()
                        .flatten()
                        .flat_map(|w| self.watchers[w].iter().copied())
                        .collect();
                    affected.sort_unstable();
                    affected.dedup();
                    let before: i64 = affected.iter().map(|&e| self.objective_term(e)).sum();
                    self.flip(j, i, &mut touched);
                    let after: i64 = affected.iter().map(|&e| self.objective_term(e)).sum();
                    let ok = after < before && touched.iter().all(|&e| !self.is_violated(e));
                    if ok {
                        accepted += 1;
                        improved = true;
                    } else {
                        self.flip(j, i, &mut touched);
                    }
                }
            }
            if !improved {
                break;
            }
        }
        accepted
    }

    fn report(&self, e: usize) -> BadEventReport {
        let c = self.value(e);
        match &self.events[e] {
            EventSpec::Window { center, lo, hi, kind, .. } => BadEventReport {
                kind: *kind,
                subject: Subject::Vertex(*center),
                observed: c,
                lower: *lo,
                upper: Some(*hi),
            },
            EventSpec::Goodness { center, members, threshold, .. } => BadEventReport {
                kind: BadEventKind::Goodness,
                subject: Subject::Vertex(*center),
                observed: c.min(members.len() as i64 - c),
                lower: *threshold,
                upper: None,
            },
            EventSpec::Crossing { u, v } => BadEventReport {
                kind: BadEventKind::UncrossedEdge,
                subject: Subject::Edge(*u, *v),
                observed: c,
                lower: 1.0,
                upper: Some(self.k as f64),
            },
        }
    }

    fn worst_report(&self) -> BadEventReport {
        self.violated
            .iter()
            .map(|&e| self.report(e))
            .max_by(|a, b| a.excess().total_cmp(&b.excess()))
            .expect("called with violations")
    }

    pub fn plan(&self) -> &BisectionPlan {
        &self.plan
    }

    pub fn into_plan(self) -> (BisectionPlan, ResampleStats) {
        (self.plan, self.stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn engine_for(seed: u64) -> Engine {
        let g = crate::generators::random_regular(120, 16, seed).unwrap();
        let x: Vec<usize> = (0..60).collect();
        let mut events = Vec::new();
        for v in 0..60 {
            events.push(EventSpec::Window {
                center: v,
                j: 0,
                members: g.neighbors(v).iter().copied().filter(|&w| w < 60).collect(),
                lo: 0.0,
                hi: 16.0,
                center2: g.neighbors(v).iter().filter(|&&w| w < 60).count() as i64,
                cut: false,
                score: WindowScore::Deviation,
                kind: BadEventKind::DegreeConcentration,
            });
        }
        for y in 60..120 {
            let members: Vec<usize> = g.neighbors(y).iter().copied().filter(|&w| w < 60).collect();
            events.push(EventSpec::Goodness { center: y, j: 1, members, threshold: 1.0 });
        }
        for (u, v) in g.edges().filter(|&(u, v)| u < 60 && v < 60) {
            events.push(EventSpec::Crossing { u, v });
        }
        Engine::new(120, &x, 5, events)
    }

    fn assert_counts_fresh(e: &mut Engine) {
        let saved = e.counts.clone();
        for i in 0..e.events.len() {
            e.recount(i);
        }
        assert_eq!(saved, e.counts);
        for i in 0..e.events.len() {
            assert_eq!(e.violated.contains(&i), e.is_violated(i));
        }
    }

    #[test]
    fn incremental_counts_match_recount() {
        for seed in 0..5 {
            let mut e = engine_for(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            e.randomize(&mut rng);
            e.run(&mut rng, 100_000).unwrap();
            assert_counts_fresh(&mut e);
            e.tighten(8);
            assert_counts_fresh(&mut e);
            assert!(e.violated.is_empty());
        }
    }

    #[test]
    fn canonical_pairing_with_dummy() {
        let p = Pairing::canonical(&[7, 3, 5]);
        assert_eq!(p.pairs, vec![(3, Some(5)), (7, None)]);
        assert!(p.has_dummy());
        let plan = BisectionPlan { pairing: p, decisions: vec![vec![true, false]] };
        let bp = plan.bipartition(0);
        assert_eq!((bp.left, bp.right), (vec![3], vec![5, 7]));
    }
}
