use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::vizing::vizing_color;
use crate::graph::{BipartiteGraph, Edge, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefineError {
    #[error("ground sets differ in size: {a} vs {b}")]
    SizeMismatch { a: usize, b: usize },
    #[error("partitions must be nonempty with nonempty blocks")]
    EmptyPartition,
    #[error("blocks of a partition overlap")]
    Overlap,
    #[error("refinement does not match the input pieces: {0}")]
    Inconsistent(String),
}

/// Matched refinements `parts_a[i] ⊆ P-block`, `parts_b[i] ⊆ Q-block`, equal sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementResult<T> {
    pub parts_a: Vec<Vec<T>>,
    pub parts_b: Vec<Vec<T>>,
    /// `origin_a[i]` is the index of the `p` block containing `parts_a[i]`.
    pub origin_a: Vec<usize>,
    pub origin_b: Vec<usize>,
}

impl<T> RefinementResult<T> {
    pub fn t(&self) -> usize {
        self.parts_a.len()
    }
}

fn validate<T: Ord + Clone>(p: &[Vec<T>]) -> Result<usize, RefineError> {
    if p.is_empty() || p.iter().any(Vec::is_empty) {
        return Err(RefineError::EmptyPartition);
    }
    let mut all = BTreeSet::new();
    for block in p {
        for x in block {
            if !all.insert(x.clone()) {
                return Err(RefineError::Overlap);
            }
        }
    }
    Ok(all.len())
}

/// Refines `p` (a partition of `A`) and `q` (of `B`, `|A| = |B|`) into
/// `t ≤ |p| + |q| − 1` pairs of equal-size blocks.
///
/// Repeatedly takes a minimum-cardinality block (from `p` before `q`,
/// lowest index on ties), carves its size from the lowest-index live block on
/// the other side using that block's smallest elements, and recurses on what
/// is left.
pub fn equal_size_refine<T: Ord + Clone>(p: &[Vec<T>], q: &[Vec<T>]) -> Result<RefinementResult<T>, RefineError> {
    let (a, b) = (validate(p)?, validate(q)?);
    if a != b {
        return Err(RefineError::SizeMismatch { a, b });
    }
    let sorted = |blocks: &[Vec<T>]| -> Vec<Vec<T>> {
        blocks
            .iter()
            .map(|blk| {
                let mut v = blk.clone();
                v.sort();
                v
            })
            .collect()
    };
    // Live blocks with their original indices; a block is dead once empty.
    let mut live = [sorted(p), sorted(q)];
    let mut out = RefinementResult {
        parts_a: Vec::new(),
        parts_b: Vec::new(),
        origin_a: Vec::new(),
        origin_b: Vec::new(),
    };
    loop {
        let alive = |side: &Vec<Vec<T>>| side.iter().filter(|blk| !blk.is_empty()).count();
        let (la, lb) = (alive(&live[0]), alive(&live[1]));
        if la == 0 && lb == 0 {
            break;
        }
        debug_assert!(la > 0 && lb > 0);
        let mut best: Option<(usize, usize, usize)> = None;
        for side in 0..2 {
            for (i, blk) in live[side].iter().enumerate() {
                if !blk.is_empty() && best.is_none_or(|(len, _, _)| blk.len() < len) {
                    best = Some((blk.len(), side, i));
                }
            }
        }
        let (size, side, i) = best.expect("some block alive");
        let other = 1 - side;
        let j = live[other]
            .iter()
            .position(|blk| !blk.is_empty())
            .expect("other side alive");
        let whole = std::mem::take(&mut live[side][i]);
        let carved: Vec<T> = live[other][j].drain(..size).collect();
        let (sa, sb, ia, ib) = if side == 0 {
            (whole, carved, i, j)
        } else {
            (carved, whole, j, i)
        };
        out.parts_a.push(sa);
        out.parts_b.push(sb);
        out.origin_a.push(ia);
        out.origin_b.push(ib);
    }
    Ok(out)
}

/// Splits the pieces on each side into matched sub-pieces of equal edge
/// counts. Inside each piece, edges are ordered by the rank of their color
/// class in a proper edge coloring (largest class first), so every carved
/// prefix is a union of whole matchings plus part of one more.
pub fn split_by_refinement(
    pieces_a: &[BipartiteGraph],
    pieces_b: &[BipartiteGraph],
) -> Result<(Vec<BipartiteGraph>, Vec<BipartiteGraph>), RefineError> {
    let keyed = |pieces: &[BipartiteGraph]| -> Vec<Vec<(usize, usize, Edge)>> {
        pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut classes = vizing_color(&p.graph).classes();
                classes.sort_by_key(|c| std::cmp::Reverse(c.len()));
                classes
                    .into_iter()
                    .enumerate()
                    .flat_map(|(rank, c)| c.into_iter().map(move |e| (i, rank, e)))
                    .collect()
            })
            .collect()
    };
    let (ka, kb) = (keyed(pieces_a), keyed(pieces_b));
    let nonempty = |k: &[Vec<(usize, usize, Edge)>]| -> Vec<Vec<(usize, usize, Edge)>> {
        k.iter().filter(|b| !b.is_empty()).cloned().collect()
    };
    let (pa, pb) = (nonempty(&ka), nonempty(&kb));
    if pa.is_empty() && pb.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let r = equal_size_refine(&pa, &pb)?;
    let build = |parts: &[Vec<(usize, usize, Edge)>], pieces: &[BipartiteGraph]| -> Result<Vec<BipartiteGraph>, RefineError> {
        parts
            .iter()
            .map(|part| {
                let src = part[0].0;
                if part.iter().any(|&(i, _, _)| i != src) {
                    return Err(RefineError::Inconsistent("part spans two pieces".into()));
                }
                let piece = &pieces[src];
                let n = piece.graph.n();
                Ok(BipartiteGraph {
                    graph: Graph::from_edges_trusted(n, part.iter().map(|&(_, _, e)| e)),
                    bipartition: piece.bipartition.clone(),
                })
            })
            .collect()
    };
    Ok((build(&r.parts_a, pieces_a)?, build(&r.parts_b, pieces_b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Bipartition;

    fn check<T: Ord + Clone + std::fmt::Debug>(p: &[Vec<T>], q: &[Vec<T>], r: &RefinementResult<T>) {
        assert!(r.t() < p.len() + q.len());
        assert_eq!(r.parts_a.len(), r.parts_b.len());
        for i in 0..r.t() {
            assert_eq!(r.parts_a[i].len(), r.parts_b[i].len());
            assert!(!r.parts_a[i].is_empty());
            assert!(r.parts_a[i].iter().all(|x| p[r.origin_a[i]].contains(x)));
            assert!(r.parts_b[i].iter().all(|x| q[r.origin_b[i]].contains(x)));
        }
        let flat = |v: &[Vec<T>]| {
            let mut f: Vec<T> = v.iter().flatten().cloned().collect();
            f.sort();
            f
        };
        assert_eq!(flat(&r.parts_a), flat(p));
        assert_eq!(flat(&r.parts_b), flat(q));
    }

    #[test]
    fn trivial_pair() {
        let p = vec![vec![1, 2, 3]];
        let q = vec![vec![7, 8, 9]];
        let r = equal_size_refine(&p, &q).unwrap();
        assert_eq!(r.t(), 1);
        assert_eq!((r.parts_a[0].clone(), r.parts_b[0].clone()), (vec![1, 2, 3], vec![7, 8, 9]));
    }

    #[test]
    fn small_example() {
        let p = vec![vec![1, 2], vec![3, 4]];
        let q = vec![vec![1, 2, 3], vec![4]];
        let r = equal_size_refine(&p, &q).unwrap();
        check(&p, &q, &r);
        assert_eq!(r.t(), 3);
        let sizes: Vec<usize> = r.parts_a.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 1, 2]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            equal_size_refine(&[vec![1]], &[vec![1, 2]]),
            Err(RefineError::SizeMismatch { a: 1, b: 2 })
        );
        assert_eq!(equal_size_refine::<u8>(&[], &[vec![1]]), Err(RefineError::EmptyPartition));
        assert_eq!(equal_size_refine(&[vec![1], vec![1]], &[vec![1, 2]]), Err(RefineError::Overlap));
    }

    #[test]
    fn random_partitions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.gen_range(3..40);
            let split = |rng: &mut rand_chacha::ChaCha8Rng, blocks: usize| {
                let mut v: Vec<Vec<usize>> = vec![Vec::new(); blocks];
                for x in 0..n {
                    let b = if x < blocks { x } else { rng.gen_range(0..blocks) };
                    v[b].push(x);
                }
                v
            };
            let bp = rng.gen_range(1..4.min(n));
            let p = split(&mut rng, bp);
            let bq = rng.gen_range(1..5.min(n));
            let q = split(&mut rng, bq);
            let r = equal_size_refine(&p, &q).unwrap();
            check(&p, &q, &r);
        }
    }

    fn piece(n: usize, edges: &[Edge]) -> BipartiteGraph {
        BipartiteGraph {
            graph: Graph::from_edges(n, edges.iter().copied()).unwrap(),
            bipartition: Bipartition::new(vec![0, 1, 2], vec![3, 4, 5]).unwrap(),
        }
    }

    #[test]
    fn split_pieces() {
        let a = piece(6, &[(0, 3), (1, 4)]);
        let b = piece(6, &[(0, 4), (1, 5), (2, 3)]);
        let c = piece(6, &[(0, 3), (0, 4), (1, 3), (1, 5), (2, 5)]);
        let (xa, xb) = split_by_refinement(&[a.clone(), b.clone()], &[c]).unwrap();
        let ca: Vec<usize> = xa.iter().map(|p| p.graph.edge_count()).collect();
        let cb: Vec<usize> = xb.iter().map(|p| p.graph.edge_count()).collect();
        assert_eq!(ca, cb);
        let mut sorted = ca.clone();
        sorted.sort();
        assert_eq!(sorted, vec![2, 3]);

        let (ya, yb) = split_by_refinement(std::slice::from_ref(&a), std::slice::from_ref(&a)).unwrap();
        assert_eq!(ya[0].graph, a.graph);
        assert_eq!(yb[0].graph, a.graph);
    }
}
