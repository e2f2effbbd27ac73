//! Decomposition of regular graphs into regular bipartite spanning subgraphs.
//!
//! A `d`-regular graph on an even number of vertices is split by
//! [`pipeline::decompose`] into edge-disjoint spanning subgraphs, each
//! bipartite and regular, with at most `log₂ d + 36` parts. Every result is
//! rechecked by [`pipeline::verify`] from raw edges before it is returned,
//! and [`pipeline::one_factorization`] turns a decomposition into `d`
//! perfect matchings.
//!
//! The supporting modules are usable on their own: [`graph`] (simple graphs
//! and the edge-list format), [`generators`], [`spectral`] (eigenvalue
//! certificates and the mixing inequality), [`bisect`] (resampling-based
//! bisections), [`edge_tools`] (edge coloring, equal-size subgraphs and
//! refinement), and [`factor`] (bipartite `f`-factors by flow).

#![allow(clippy::needless_range_loop)]

pub mod bisect;
pub mod cli;
pub mod edge_tools;
pub mod factor;
pub mod generators;
pub mod graph;
pub mod params;
pub mod pipeline;
pub mod spectral;
