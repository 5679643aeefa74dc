//! Lowest eigenpair of a real symmetric matrix: dense decomposition for small
//! dimensions, restarted Lanczos with full reorthogonalization otherwise.

use nalgebra::{DMatrix, SymmetricEigen};

use super::sparse::SparseSymmetric;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Largest dimension handled by the dense solver.
    pub dense_limit: usize,
    /// Target residual `||Hv - Ev|| <= tol * max(1, |E|)`.
    pub tol: f64,
    pub max_krylov: usize,
    pub max_restarts: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_limit: 400,
            tol: 1e-10,
            max_krylov: 300,
            max_restarts: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    /// Unit norm; sign fixed so the largest-magnitude component is positive.
    pub vector: Vec<f64>,
    pub residual: f64,
    /// Matrix-vector products spent (zero for the dense path).
    pub iterations: usize,
}

/// Unit vector `e_0` plus a small deterministic perturbation on every component.
pub fn default_seed(dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim)
        .map(|i| 1e-3 * (((i as f64 + 1.0) * 0.618_033_988_749_895).fract() - 0.5))
        .collect();
    if dim > 0 {
        v[0] += 1.0;
    }
    v
}

pub fn ground_state(h: &SparseSymmetric, opts: &EigenOptions) -> Result<Eigenpair> {
    ground_state_from(h, &default_seed(h.dim()), opts)
}

/// Like [`ground_state`], with an explicit Lanczos start vector. The dense
/// path ignores the seed.
pub fn ground_state_from(h: &SparseSymmetric, seed: &[f64], opts: &EigenOptions) -> Result<Eigenpair> {
    if h.dim() == 0 {
        return Err(Error::invalid("matrix", "empty matrix"));
    }
    if h.dim() <= opts.dense_limit {
        dense_ground_state(h)
    } else {
        lanczos_ground_state(h, seed, opts)
    }
}

fn residual_norm(h: &SparseSymmetric, v: &[f64], e: f64) -> f64 {
    let mut hv = vec![0.0; v.len()];
    h.matvec(v, &mut hv);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - e * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn fix_sign(v: &mut [f64]) {
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, &x)| if x.abs() > best.1.abs() { (i, x) } else { best })
        .1;
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dense_ground_state(h: &SparseSymmetric) -> Result<Eigenpair> {
    let eig = SymmetricEigen::new(h.to_dense());
    let (idx, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let mut vector: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    normalize(&mut vector);
    fix_sign(&mut vector);
    let residual = residual_norm(h, &vector, energy);
    Ok(Eigenpair {
        energy,
        vector,
        residual,
        iterations: 0,
    })
}

fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (theta, eig.eigenvectors.column(idx).iter().copied().collect())
}

fn lanczos_ground_state(h: &SparseSymmetric, seed: &[f64], opts: &EigenOptions) -> Result<Eigenpair> {
    let dim = h.dim();
    if seed.len() != dim {
        return Err(Error::invalid("seed", "length differs from matrix dimension"));
    }
    // Keep the stored Krylov basis under ~400 MB.
    let memory_cap = (50_000_000 / dim).max(20);
    let m = opts.max_krylov.min(dim).min(memory_cap).max(2);

    let mut start = seed.to_vec();
    if normalize(&mut start) == 0.0 {
        return Err(Error::invalid("seed", "zero start vector"));
    }
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;
    let mut w = vec![0.0; dim];

    for _restart in 0..opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut ritz = (0.0, vec![1.0]);

        for k in 0..m {
            h.matvec(&basis[k], &mut w);
            matvecs += 1;
            let a = dot(&basis[k], &w);
            alpha.push(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = dot(&w, &w).sqrt();

            let check = (k + 1) % 5 == 0 || k + 1 == m || b < 1e-14 * a.abs().max(1.0);
            if check {
                ritz = tridiagonal_lowest(&alpha, &beta);
                let estimate = b * ritz.1.last().copied().unwrap_or(0.0).abs();
                if estimate <= 0.1 * opts.tol * ritz.0.abs().max(1.0) {
                    break;
                }
            }
            if b < 1e-14 * a.abs().max(1.0) || k + 1 == m {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }

        let (_, coeffs) = ritz;
        let mut x = vec![0.0; dim];
        for (q, c) in basis.iter().zip(&coeffs) {
            x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += c * qi);
        }
        normalize(&mut x);
        // Rayleigh quotient of the assembled vector.
        h.matvec(&x, &mut w);
        matvecs += 1;
        let energy = dot(&x, &w);
        let residual = w
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - energy * b).powi(2))
            .sum::<f64>()
            .sqrt();
        last_residual = residual;
        if residual <= opts.tol * energy.abs().max(1.0) {
            fix_sign(&mut x);
            return Ok(Eigenpair {
                energy,
                vector: x,
                residual,
                iterations: matvecs,
            });
        }
        start = x;
    }

    Err(Error::NonConvergence {
        what: "Lanczos ground state",
        iterations: matvecs,
        residual: last_residual,
    })
}
