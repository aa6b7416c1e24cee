//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the
//! transformation stays unitary and the diagonal stays real.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerances::MAX_JACOBI_SWEEPS;

/// Spectrum of a Hermitian matrix: ascending eigenvalues and the unitary
/// whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenResult {
    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &lambda) in self.eigenvalues.iter().enumerate() {
                    acc += v[(r, k)] * lambda * v[(c, k)].conj();
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    /// Largest `||A v_k - lambda_k v_k||_inf` over all pairs.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        let n = self.eigenvalues.len();
        let mut worst: f64 = 0.0;
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(k);
            for r in 0..n {
                let av: Complex64 = (0..n).map(|c| a[(r, c)] * v[c]).sum();
                worst = worst.max((av - v[r] * lambda).norm());
            }
        }
        worst
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in ascending order (stable with respect to the
/// converged diagonal for exact ties) and every eigenvector is rescaled by a
/// phase so that its first non-negligible component is real and positive.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigenResult> {
    a.ensure_hermitian()?;
    let n = a.rows();
    let mut work = a.hermitian_part();
    let mut vecs = ComplexMatrix::identity(n);

    let frob = work.norm_frobenius();
    if n > 1 && frob > 0.0 {
        let target = f64::EPSILON * n as f64 * frob;
        let negligible = 1e-18 * frob;
        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            if off_diagonal_norm(&work) <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = work[(p, q)];
                    let r = apq.norm();
                    if r <= negligible {
                        continue;
                    }
                    rotate(&mut work, &mut vecs, p, q, apq / r, r);
                }
            }
        }
        if !converged && off_diagonal_norm(&work) > target {
            return Err(Error::NoConvergence {
                sweeps: MAX_JACOBI_SWEEPS,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|k| work[(k, k)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = vecs.column(src);
        let pivot = col.iter().copied().find(|z| z.norm() > 1e-12);
        let phase = pivot.map_or(Complex64::new(1.0, 0.0), |z| z.conj() / z.norm());
        for (r, z) in col.into_iter().enumerate() {
            eigenvectors[(r, dst)] = z * phase;
        }
    }
    Ok(HermitianEigenResult {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            acc += a[(p, q)].norm_sqr();
        }
    }
    (2.0 * acc).sqrt()
}

/// Annihilates `work[(p, q)]` where `work[(p, q)] = r * phase`.
fn rotate(
    work: &mut ComplexMatrix,
    vecs: &mut ComplexMatrix,
    p: usize,
    q: usize,
    phase: Complex64,
    r: f64,
) {
    let n = work.rows();
    let app = work[(p, p)].re;
    let aqq = work[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();

    // A <- A J with J_pp = c, J_pq = s, J_qp = -s e^{-i phi}, J_qq = c e^{-i phi}
    for k in 0..n {
        let akp = work[(k, p)];
        let akq = work[(k, q)];
        work[(k, p)] = akp * c - akq * ph_conj * s;
        work[(k, q)] = akp * s + akq * ph_conj * c;
    }
    // A <- J^dagger A
    for k in 0..n {
        let apk = work[(p, k)];
        let aqk = work[(q, k)];
        work[(p, k)] = apk * c - aqk * phase * s;
        work[(q, k)] = apk * s + aqk * phase * c;
    }
    work[(p, q)] = Complex64::new(0.0, 0.0);
    work[(q, p)] = Complex64::new(0.0, 0.0);
    work[(p, p)] = Complex64::new(work[(p, p)].re, 0.0);
    work[(q, q)] = Complex64::new(work[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = vecs[(k, p)];
        let vkq = vecs[(k, q)];
        vecs[(k, p)] = vkp * c - vkq * ph_conj * s;
        vecs[(k, q)] = vkp * s + vkq * ph_conj * c;
    }
}
