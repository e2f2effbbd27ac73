use serde::{Deserialize, Serialize};

use super::Decomposed;
use crate::graph::{edge, Bipartition, Decomposition, SpanningBipartitePiece};
use crate::params::Mode;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartJson {
    pub bipartition: [Vec<usize>; 2],
    pub degree: usize,
    pub edges: Vec<[usize; 2]>,
}

/// Serialized form of a decomposition run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub n: usize,
    pub d: usize,
    pub mode: Mode,
    pub seed: u64,
    pub parts: Vec<PartJson>,
    pub leftover_degree: usize,
    pub part_count: usize,
    pub bound: f64,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl DecompositionJson {
    pub fn from_decomposed(dec: &Decomposed) -> Self {
        let parts = dec
            .decomposition
            .pieces
            .iter()
            .zip(&dec.report.piece_degrees)
            .map(|(p, deg)| PartJson {
                bipartition: [p.bipartition.left.clone(), p.bipartition.right.clone()],
                degree: deg.unwrap_or(0),
                edges: p.edges.iter().map(|&(u, v)| [u, v]).collect(),
            })
            .collect();
        DecompositionJson {
            n: dec.n,
            d: dec.d,
            mode: dec.mode,
            seed: dec.seed,
            parts,
            leftover_degree: dec.leftover_degree,
            part_count: dec.decomposition.pieces.len(),
            bound: dec.report.bound,
            verified: dec.report.all_green(),
            timestamp: None,
        }
    }

    /// Rebuilds the pieces without validating them, so that [`super::verify`]
    /// can report what is wrong with a tampered file.
    pub fn to_decomposition(&self) -> Decomposition {
        let pieces = self
            .parts
            .iter()
            .map(|p| SpanningBipartitePiece {
                host_n: self.n,
                bipartition: Bipartition {
                    left: p.bipartition[0].clone(),
                    right: p.bipartition[1].clone(),
                },
                edges: p.edges.iter().map(|&[u, v]| edge(u, v)).collect(),
                degree: Some(p.degree),
            })
            .collect();
        Decomposition {
            host_n: self.n,
            pieces,
        }
    }
}
