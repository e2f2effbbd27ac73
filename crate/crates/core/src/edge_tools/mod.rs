//! Edge-count surgery: proper edge colorings, trimming to an exact edge
//! count, and equal-size refinements of two partitions.

mod refine;
mod subgraph;
mod vizing;

pub use refine::{equal_size_refine, split_by_refinement, RefineError, RefinementResult};
pub use subgraph::{m_edge_subgraph, removed_degree_bound, spread_bound, SubgraphError, Trimmed};
pub use vizing::{vizing_color, EdgeColoring};
