//! Property tests of library invariants against the oracles in `common`.

mod common;

use proptest::prelude::*;
use regbip::edge_tools::{equal_size_refine, m_edge_subgraph, vizing_color};
use regbip::factor::{f_factor, DegreeSpec, FactorOutcome};
use regbip::generators::{circulant, random_regular};
use regbip::graph::{parse_edge_list, write_edge_list, BipartiteGraph, Bipartition, Graph};
use regbip::pipeline::{decompose, verify, PipelineParams};

use common::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=3 * n).prop_map(move |pairs| {
            let mut edges: Vec<_> = pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| norm(u, v)).collect();
            edges.sort_unstable();
            edges.dedup();
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trip(g in graph_strategy(30)) {
        let back = parse_edge_list(&write_edge_list(&g)).unwrap();
        prop_assert_eq!(back.edge_vec(), g.edge_vec());
        prop_assert_eq!(back.n(), g.n());
    }

    #[test]
    fn vizing_is_proper(g in graph_strategy(25)) {
        let c = vizing_color(&g);
        prop_assert!(coloring_clash(&g, |u, v| c.color(u, v)).is_none());
        prop_assert!(c.k <= g.max_degree() + 1);
    }

    #[test]
    fn trimming_keeps_exactly_m(g in graph_strategy(25), frac in 0.0f64..=1.0) {
        prop_assume!(g.edge_count() > 0);
        let m = ((frac * g.edge_count() as f64).ceil() as usize).max(1);
        let t = m_edge_subgraph(&g, m).unwrap();
        prop_assert_eq!(t.kept.edge_count(), m);
        prop_assert_eq!(t.kept.edge_count() + t.removed.edge_count(), g.edge_count());
        prop_assert!(t.kept.is_subgraph_of(&g) && t.removed.is_subgraph_of(&g));
    }

    #[test]
    fn refinement_sizes_match(sizes_a in proptest::collection::vec(1usize..6, 1..6), seed in any::<u64>()) {
        let total: usize = sizes_a.iter().sum();
        let a: Vec<usize> = (0..total).collect();
        let mut p = Vec::new();
        let mut at = 0;
        for s in &sizes_a {
            p.push(a[at..at + s].to_vec());
            at += s;
        }
        // Split B into blocks of pseudo-random sizes.
        let mut q = Vec::new();
        let (mut at, mut x) = (0, seed | 1);
        while at < total {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            let len = 1 + (x % 4) as usize;
            let end = (at + len).min(total);
            q.push((100 + at..100 + end).collect::<Vec<_>>());
            at = end;
        }
        let r = equal_size_refine(&p, &q).unwrap();
        prop_assert!(r.t() < p.len() + q.len());
        for (x, y) in r.parts_a.iter().zip(&r.parts_b) {
            prop_assert_eq!(x.len(), y.len());
        }
    }

    #[test]
    fn f_factor_matches_backtracking(mask in any::<u16>(), fvals in proptest::collection::vec(0usize..3, 8)) {
        let (x, y): (Vec<usize>, Vec<usize>) = ((0..4).collect(), (4..8).collect());
        let edges: Vec<_> = (0..16).filter(|i| mask >> i & 1 == 1).map(|i| (i / 4, 4 + i % 4)).collect();
        let fx: usize = fvals[..4].iter().sum();
        let fy: usize = fvals[4..].iter().sum();
        prop_assume!(fx == fy);
        let h = BipartiteGraph {
            graph: Graph::from_edges(8, edges.iter().copied()).unwrap(),
            bipartition: Bipartition::new(x.clone(), y.clone()).unwrap(),
        };
        let spec = DegreeSpec::from_fn(&h.bipartition, |v| fvals[v]);
        let found = matches!(f_factor(&h, &spec).unwrap(), FactorOutcome::Factor(_));
        prop_assert_eq!(found, f_factor_exists(&x, &y, &edges, &fvals));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// Whatever the seed, a successful run passes the independent recount.
    #[test]
    fn decompositions_recount_clean(seed in 0u64..1000, which in 0usize..3) {
        let g = match which {
            0 => regbip::generators::complete(16).unwrap(),
            1 => circulant(40, &(1..=16).collect::<Vec<_>>()).unwrap(),
            _ => random_regular(64, 32, seed).unwrap(),
        };
        let dec = decompose(&g, &PipelineParams::practical(seed)).unwrap();
        let degrees = check_decomposition(&g, &dec.decomposition).map_err(TestCaseError::fail)?;
        prop_assert_eq!(degrees.iter().sum::<usize>(), g.regular_degree().unwrap());
        prop_assert!(verify(&g, &dec.decomposition).all_green());
    }
}
