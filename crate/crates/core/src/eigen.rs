//! Cyclic Jacobi eigendecomposition for small dense symmetric matrices.
//!
//! Rotations are applied in a fixed row-major `(p, q)` order, so identical
//! input bits always give identical output bits. Eigenpairs come back sorted
//! ascending and each eigenvector is sign-canonicalized so that its first
//! significant component is positive.

use thiserror::Error;

use crate::hamiltonian::SymMatrix;

/// Largest accepted matrix dimension.
pub const MAX_DIM: usize = 64;
/// Sweeps stop once `off-diagonal norm < RELATIVE_TOLERANCE * diagonal norm`.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;
/// Components smaller than this are skipped when choosing the sign.
const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix dimension {0} exceeds the supported maximum of {MAX_DIM}")]
    TooLarge(usize),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
}

/// Ascending eigenvalues with their orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    dim: usize,
    values: Vec<f64>,
    /// Eigenvectors stored contiguously, vector `k` at `[k * dim .. (k + 1) * dim]`.
    vectors: Vec<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Eigenvector paired with `values()[k]`.
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.dim)
    }

    /// Largest entry of `|VᵀV - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..self.dim {
            for b in a..self.dim {
                let dot: f64 = self
                    .vector(a)
                    .iter()
                    .zip(self.vector(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Builds a system from explicit parts. Used for checking residuals of
    /// externally supplied eigenpairs.
    pub fn from_parts(values: Vec<f64>, vectors: Vec<Vec<f64>>) -> Self {
        let dim = values.len();
        assert_eq!(vectors.len(), dim, "one vector per eigenvalue");
        let mut flat = Vec::with_capacity(dim * dim);
        for v in &vectors {
            assert_eq!(v.len(), dim, "vector length must equal dimension");
            flat.extend_from_slice(v);
        }
        Self {
            dim,
            values,
            vectors: flat,
        }
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += 2.0 * a[p * n + q] * a[p * n + q];
        }
    }
    s.sqrt()
}

fn diagonal_norm(a: &[f64], n: usize) -> f64 {
    (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum::<f64>().sqrt()
}

/// Diagonalizes a symmetric matrix by cyclic Jacobi rotations.
pub fn eigendecompose(matrix: &SymMatrix) -> Result<EigenSystem, EigenError> {
    let n = matrix.dim();
    if n > MAX_DIM {
        return Err(EigenError::TooLarge(n));
    }
    if matrix.entries().iter().any(|x| !x.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let mut a = matrix.entries().to_vec();
    // v is row-major with eigenvectors in its columns.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off == 0.0 || off < RELATIVE_TOLERANCE * diagonal_norm(&a, n) {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(EigenError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));

    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &col in &order {
        let start = vectors.len();
        vectors.extend((0..n).map(|row| v[row * n + col]));
        canonicalize_sign(&mut vectors[start..]);
    }
    Ok(EigenSystem {
        dim: n,
        values,
        vectors,
    })
}

/// One Jacobi rotation zeroing `a[p][q]`.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    // theta.signum() is +1 for theta == +0.0, which is the convention we want.
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp;
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq;
    }
    for r in 0..n {
        let vrp = v[r * n + p];
        let vrq = v[r * n + q];
        v[r * n + p] = c * vrp - s * vrq;
        v[r * n + q] = s * vrp + c * vrq;
    }
}

fn canonicalize_sign(vec: &mut [f64]) {
    if let Some(first) = vec.iter().find(|x| x.abs() > SIGN_TOLERANCE) {
        if *first < 0.0 {
            vec.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// `max_k max_i |(H v_k - λ_k v_k)_i| / (1 + |λ_k|)`.
pub fn residual_norm(system: &EigenSystem, matrix: &SymMatrix) -> f64 {
    assert_eq!(system.dim(), matrix.dim(), "dimension mismatch");
    let mut worst = 0.0_f64;
    for (k, vk) in system.vectors().enumerate() {
        let lambda = system.value(k);
        let hv = matrix.mul_vec(vk);
        let r = hv
            .iter()
            .zip(vk)
            .map(|(h, x)| (h - lambda * x).abs())
            .fold(0.0, f64::max);
        worst = worst.max(r / (1.0 + lambda.abs()));
    }
    worst
}
