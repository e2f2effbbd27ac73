//! Test-graph generators: complete graphs, circulants and random regular graphs.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, Edge, Graph};

/// Full restarts allowed before [`random_regular`] gives up.
pub const RESTART_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("complete graph needs n >= 2, got {0}")]
    TooFewVertices(usize),
    #[error("invalid circulant offset {offset} for n = {n} (allowed 1..={max})")]
    InvalidOffset { offset: usize, n: usize, max: usize },
    #[error("no simple {d}-regular graph on {n} vertices")]
    Infeasible { n: usize, d: usize },
    #[error("random_regular exceeded {0} restarts")]
    RestartCapExceeded(usize),
    #[error("bad generator spec {spec:?}: {msg}")]
    BadSpec { spec: String, msg: String },
}

pub fn complete(n: usize) -> Result<Graph, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::TooFewVertices(n));
    }
    Ok(Graph::from_edges_trusted(
        n,
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))),
    ))
}

/// `i ~ i +- s (mod n)` for each offset `s` in `1..=n/2`.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<Graph, GeneratorError> {
    let max = n / 2;
    let mut edges = std::collections::BTreeSet::new();
    for &s in offsets {
        if s == 0 || s > max {
            return Err(GeneratorError::InvalidOffset { offset: s, n, max });
        }
        for i in 0..n {
            edges.insert(edge(i, (i + s) % n));
        }
    }
    Ok(Graph::from_edges_trusted(n, edges))
}

/// Samples a simple `d`-regular graph by randomly pairing degree stubs.
///
/// Stubs are shuffled and paired; pairs that would form a loop or a repeated
/// edge are returned to the pool and reshuffled. When no admissible pair is
/// left in the pool the whole pairing restarts.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GeneratorError> {
    if !(n * d).is_multiple_of(2) || (d > 0 && d >= n) {
        return Err(GeneratorError::Infeasible { n, d });
    }
    if d == 0 {
        return Ok(Graph::empty(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESTART_CAP {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            let mut edges: Vec<Edge> = edges.into_iter().collect();
            edges.sort_unstable();
            return Ok(Graph::from_edges_trusted(n, edges));
        }
    }
    Err(GeneratorError::RestartCapExceeded(RESTART_CAP))
}

fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<HashSet<Edge>> {
    let mut edges: HashSet<Edge> = HashSet::with_capacity(n * d / 2);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    while !stubs.is_empty() {
        let mut leftover: BTreeMap<usize, usize> = BTreeMap::new();
        stubs.shuffle(rng);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u != v && !edges.contains(&edge(u, v)) {
                edges.insert(edge(u, v));
            } else {
                *leftover.entry(u).or_default() += 1;
                *leftover.entry(v).or_default() += 1;
            }
        }
        if !leftover.is_empty() && !has_admissible_pair(&edges, &leftover) {
            return None;
        }
        stubs = leftover
            .into_iter()
            .flat_map(|(v, c)| std::iter::repeat_n(v, c))
            .collect();
    }
    Some(edges)
}

fn has_admissible_pair(edges: &HashSet<Edge>, pool: &BTreeMap<usize, usize>) -> bool {
    let vs: Vec<usize> = pool.keys().copied().collect();
    vs.iter()
        .enumerate()
        .any(|(i, &u)| vs[i + 1..].iter().any(|&v| !edges.contains(&edge(u, v))))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Complete { n: usize },
    Circulant { n: usize, offsets: Vec<usize> },
    RandomRegular { n: usize, d: usize, seed: u64 },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Graph, GeneratorError> {
        match self {
            GeneratorSpec::Complete { n } => complete(*n),
            GeneratorSpec::Circulant { n, offsets } => circulant(*n, offsets),
            GeneratorSpec::RandomRegular { n, d, seed } => random_regular(*n, *d, *seed),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Complete { n } => write!(f, "complete:n={n}"),
            GeneratorSpec::Circulant { n, offsets } => {
                let o: Vec<String> = offsets.iter().map(usize::to_string).collect();
                write!(f, "circulant:n={n},offsets={}", o.join("/"))
            }
            GeneratorSpec::RandomRegular { n, d, seed } => {
                write!(f, "random_regular:n={n},d={d},seed={seed}")
            }
        }
    }
}

/// Parses `kind:key=value,...`, e.g. `random_regular:n=200,d=32,seed=7`
/// or `circulant:n=8,offsets=1/4`.
impl FromStr for GeneratorSpec {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| GeneratorError::BadSpec {
            spec: s.to_string(),
            msg: msg.to_string(),
        };
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = BTreeMap::new();
        for item in rest.split(',').filter(|t| !t.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            if kv.insert(k.trim(), v.trim()).is_some() {
                return Err(bad(&format!("repeated key {k}")));
            }
        }
        let mut take = |key: &str| kv.remove(key).ok_or_else(|| bad(&format!("missing {key}")));
        let num = |v: &str| v.parse::<u64>().map_err(|_| bad(&format!("invalid number {v:?}")));
        let spec = match kind.trim() {
            "complete" => GeneratorSpec::Complete {
                n: num(take("n")?)? as usize,
            },
            "circulant" => {
                let n = num(take("n")?)? as usize;
                let offsets = take("offsets")?
                    .split('/')
                    .map(|t| num(t).map(|x| x as usize))
                    .collect::<Result<Vec<_>, _>>()?;
                GeneratorSpec::Circulant { n, offsets }
            }
            "random_regular" => {
                let n = num(take("n")?)? as usize;
                let d = num(take("d")?)? as usize;
                let seed = match kv.remove("seed") {
                    Some(v) => num(v)?,
                    None => 0,
                };
                GeneratorSpec::RandomRegular { n, d, seed }
            }
            other => return Err(bad(&format!("unknown kind {other:?}"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(bad(&format!("unknown key {k}")));
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_examples() {
        assert_eq!(complete(2).unwrap().edge_vec(), vec![(0, 1)]);
        let k4 = complete(4).unwrap();
        assert_eq!((k4.edge_count(), k4.regular_degree()), (6, Some(3)));
        assert_eq!(complete(1), Err(GeneratorError::TooFewVertices(1)));
    }

    #[test]
    fn circulant_examples() {
        let c6 = circulant(6, &[1]).unwrap();
        assert_eq!((c6.edge_count(), c6.regular_degree()), (6, Some(2)));
        assert_eq!(circulant(5, &[1, 2]).unwrap(), complete(5).unwrap());
        let m = circulant(8, &[4]).unwrap();
        assert_eq!((m.edge_count(), m.regular_degree()), (4, Some(1)));
        assert!(circulant(8, &[5]).is_err());
        assert!(circulant(8, &[0]).is_err());
    }

    #[test]
    fn random_regular_examples() {
        assert_eq!(random_regular(4, 3, 99).unwrap(), complete(4).unwrap());
        let m = random_regular(6, 1, 5).unwrap();
        assert_eq!((m.edge_count(), m.regular_degree()), (3, Some(1)));
        assert_eq!(random_regular(5, 3, 0), Err(GeneratorError::Infeasible { n: 5, d: 3 }));
        assert_eq!(random_regular(4, 4, 0), Err(GeneratorError::Infeasible { n: 4, d: 4 }));
    }

    #[test]
    fn random_regular_is_seeded() {
        let a = random_regular(100, 10, 7).unwrap();
        assert_eq!(a, random_regular(100, 10, 7).unwrap());
        assert_eq!(a.regular_degree(), Some(10));
        assert_ne!(a, random_regular(100, 10, 8).unwrap());
    }

    #[test]
    fn spec_strings() {
        let s: GeneratorSpec = "random_regular:n=200,d=32,seed=7".parse().unwrap();
        assert_eq!(s, GeneratorSpec::RandomRegular { n: 200, d: 32, seed: 7 });
        assert_eq!(s.to_string().parse::<GeneratorSpec>().unwrap(), s);
        let c: GeneratorSpec = "circulant:n=8,offsets=1/4".parse().unwrap();
        assert_eq!(c, GeneratorSpec::Circulant { n: 8, offsets: vec![1, 4] });
        assert!("complete:n=4,x=1".parse::<GeneratorSpec>().is_err());
        assert!("hypercube:n=4".parse::<GeneratorSpec>().is_err());
    }
}
