//! Bipartite `f`-factors, perfect matchings, regularization of piece pairs,
//! and the robust-matchability probe.

mod ffactor;
mod flow;
mod matching;
mod mincost;
mod probe;
mod regularize;

use thiserror::Error;

use crate::graph::Vertex;

pub use ffactor::{exhaustive_certificate, f_factor, min_cost_f_factor, DegreeSpec, FactorOutcome, OreCertificate, EXHAUSTIVE_SIDE_LIMIT};
pub use flow::{ArcId, FlowNetwork};
pub use mincost::{CostArcId, CostFlowNetwork};
pub use matching::{hopcroft_karp, one_factorize};
pub use probe::{probe_robust_matchability, sample_bounded_subgraph, sample_demand, ProbeFailure, ProbeParams, ProbeReport};
pub use regularize::{certificate_holds, regularize_pair, regularize_pair_guided, PairGuide, RegularizationParams, Regularized};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("edge ({0}, {1}) does not cross the bipartition")]
    NotBipartite(Vertex, Vertex),
    #[error("demand given for vertex {0} outside the bipartition")]
    OutsideDomain(Vertex),
    #[error("f(X) = {fx} differs from f(Y) = {fy}")]
    SideSumMismatch { fx: usize, fy: usize },
    #[error("bipartition is not balanced and spanning")]
    NotBalanced,
    #[error("piece is not regular")]
    NotRegular,
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("no factor for {which}: e(S,T) = {} < {}", certificate.lhs, certificate.rhs)]
    NoFactor {
        which: &'static str,
        certificate: Box<OreCertificate>,
    },
    #[error("internal error: {0}")]
    Internal(String),
}
