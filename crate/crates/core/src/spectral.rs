//! Adjacency-spectrum certificates for `(n, d, lambda)` graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{crossing_pair_count, Graph, Vertex};

/// Off-diagonal Frobenius norm below which Jacobi sweeps stop.
pub const JACOBI_THRESHOLD: f64 = 1e-10;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Absolute tolerance for `lambda <= budget` and the `lambda_1 == d` self-check.
pub const LAMBDA_TOLERANCE: f64 = 1e-8;
pub const TOP_EIGENVALUE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_DENSE_THRESHOLD: usize = 2000;
pub const POWER_ITERATIONS: usize = 1000;
pub const MIXING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("budget fraction must be positive, got {0}")]
    InvalidBudget(f64),
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("top eigenvalue {found} differs from degree {d}")]
    TopEigenvalueMismatch { found: f64, d: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    /// Full cyclic-Jacobi eigendecomposition.
    Jacobi,
    /// Power iteration on `A - (d/n) J`; an estimate, not a certificate.
    PowerEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    #[serde(rename = "budget")]
    pub lambda_budget: f64,
    pub satisfied: bool,
    pub method: SpectralMethod,
}

impl SpectralCertificate {
    pub fn is_estimated(&self) -> bool {
        self.method == SpectralMethod::PowerEstimate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Certifies `lambda(G) = max(|lambda_2|, |lambda_n|)` against `d * budget_fraction`.
pub fn certify(g: &Graph, budget_fraction: f64) -> Result<SpectralCertificate, SpectralError> {
    certify_with_threshold(g, budget_fraction, DEFAULT_DENSE_THRESHOLD)
}

pub fn certify_with_threshold(
    g: &Graph,
    budget_fraction: f64,
    dense_threshold: usize,
) -> Result<SpectralCertificate, SpectralError> {
    if budget_fraction.is_nan() || budget_fraction <= 0.0 {
        return Err(SpectralError::InvalidBudget(budget_fraction));
    }
    let d = g.regular_degree().ok_or(SpectralError::NotRegular)?;
    let n = g.n();
    let (lambda, method) = if n <= dense_threshold {
        let mut eig = adjacency_eigenvalues(g)?;
        eig.sort_by(|a, b| b.total_cmp(a));
        let top = eig.first().copied().unwrap_or(0.0);
        if (top - d as f64).abs() > TOP_EIGENVALUE_TOLERANCE {
            return Err(SpectralError::TopEigenvalueMismatch { found: top, d });
        }
        let lambda = if n >= 2 {
            eig[1].abs().max(eig[n - 1].abs())
        } else {
            0.0
        };
        (lambda, SpectralMethod::Jacobi)
    } else {
        (power_estimate(g, d), SpectralMethod::PowerEstimate)
    };
    let lambda_budget = d as f64 * budget_fraction;
    Ok(SpectralCertificate {
        n,
        d,
        lambda,
        lambda_budget,
        satisfied: lambda <= lambda_budget + LAMBDA_TOLERANCE,
        method,
    })
}

/// All adjacency eigenvalues (unsorted) via cyclic Jacobi rotations.
pub fn adjacency_eigenvalues(g: &Graph) -> Result<Vec<f64>, SpectralError> {
    let n = g.n();
    let mut a = vec![0.0; n * n];
    for (u, v) in g.edges() {
        a[u * n + v] = 1.0;
        a[v * n + u] = 1.0;
    }
    jacobi_eigenvalues(&mut a, n)
}

/// Eigenvalues of a dense symmetric row-major matrix. Destroys `a`.
pub fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>, SpectralError> {
    assert_eq!(a.len(), n * n);
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    loop {
        let off = off_norm(a);
        if off < JACOBI_THRESHOLD {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(SpectralError::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    Ok((0..n).map(|i| a[i * n + i]).collect())
}

/// Largest |eigenvalue| of `A - (d/n) J` by power iteration.
fn power_estimate(g: &Graph, d: usize) -> f64 {
    let n = g.n();
    let shift = d as f64 / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut y = vec![0.0; n];
    let normalize = |v: &mut [f64]| {
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|a| *a /= norm);
        }
        norm
    };
    normalize(&mut x);
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let sum: f64 = x.iter().sum();
        for v in 0..n {
            y[v] = g.neighbors(v).iter().map(|&w| x[w]).sum::<f64>() - shift * sum;
        }
        estimate = normalize(&mut y);
        std::mem::swap(&mut x, &mut y);
        if estimate == 0.0 {
            break;
        }
    }
    estimate
}

/// Checks `|e(S,T) - (d/n)|S||T|| <= lambda * sqrt(|S||T|)` with ordered-pair counting.
pub fn mixing_check(g: &Graph, cert: &SpectralCertificate, s: &[Vertex], t: &[Vertex]) -> MixingCheck {
    let distinct = |xs: &[Vertex]| {
        let mut v = xs.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (s, t) = (distinct(s), distinct(t));
    let (ss, ts) = (s.len() as f64, t.len() as f64);
    let e = crossing_pair_count(g, &s, &t) as f64;
    let expected = if g.n() == 0 {
        0.0
    } else {
        cert.d as f64 / g.n() as f64 * ss * ts
    };
    let lhs = (e - expected).abs();
    let rhs = cert.lambda * (ss * ts).sqrt();
    MixingCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + MIXING_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, edges).unwrap()
    }

    #[test]
    fn complete_graph_spectrum() {
        let cert = certify(&generators::complete(4).unwrap(), 1.0 / 12.0).unwrap();
        assert!((cert.lambda - 1.0).abs() < 1e-8);
        assert!(!cert.satisfied);
        let cert = certify(&generators::complete(6).unwrap(), 1.0 / 12.0).unwrap();
        assert!((cert.lambda - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cycle_and_petersen() {
        let c6 = generators::circulant(6, &[1]).unwrap();
        assert!((certify(&c6, 1.0).unwrap().lambda - 2.0).abs() < 1e-8);
        assert!((certify(&petersen(), 1.0).unwrap().lambda - 2.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_irregular_and_bad_budget() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(certify(&path, 0.5), Err(SpectralError::NotRegular));
        assert!(matches!(
            certify(&petersen(), 0.0),
            Err(SpectralError::InvalidBudget(_))
        ));
    }

    #[test]
    fn power_estimate_tracks_dense() {
        let g = generators::random_regular(60, 6, 11).unwrap();
        let dense = certify(&g, 1.0).unwrap();
        let est = certify_with_threshold(&g, 1.0, 10).unwrap();
        assert!(est.is_estimated());
        assert!((dense.lambda - est.lambda).abs() < 1e-3, "{} vs {}", dense.lambda, est.lambda);
    }

    #[test]
    fn mixing_examples() {
        let k4 = generators::complete(4).unwrap();
        let cert = certify(&k4, 1.0).unwrap();
        let all = [0, 1, 2, 3];
        let m = mixing_check(&k4, &cert, &all, &all);
        assert!(m.lhs.abs() < 1e-12 && m.holds);
        let m = mixing_check(&k4, &cert, &[], &all);
        assert_eq!((m.lhs, m.rhs, m.holds), (0.0, 0.0, true));

        let p = petersen();
        let cert = certify(&p, 1.0).unwrap();
        let m = mixing_check(&p, &cert, &[0, 1, 2, 3, 4], &[5, 6, 7, 8, 9]);
        assert!((m.lhs - 2.5).abs() < 1e-9);
        assert!((m.rhs - 10.0).abs() < 1e-6);
        assert!(m.holds);
    }

    #[test]
    fn certify_is_deterministic() {
        let g = generators::random_regular(40, 5 + 1, 3).unwrap();
        assert_eq!(certify(&g, 0.5).unwrap(), certify(&g, 0.5).unwrap());
    }
}
