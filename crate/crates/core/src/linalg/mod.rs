//! Dense complex matrix kernel: products, Kronecker products, Hermitian
//! eigendecomposition and the trace / Hilbert-Schmidt norms.
//!
//! Every generator used in this crate is diagonal in the computational
//! basis, so no general matrix exponential is provided.

mod eigen;
mod matrix;

pub use eigen::{hermitian_eig, HermitianEigenResult};
pub use matrix::{hs_inner, kron, trace_of_product, ComplexMatrix};

use crate::error::{Error, Result};

/// Sum of singular values from the eigendecomposition `a^dagger a = V diag(mu) V^dagger`.
///
/// Each singular value is read off as `|a v_k|` rather than `sqrt(mu_k)`: both
/// are equal in exact arithmetic, but the square root of a round-off sized
/// `mu_k` is of order `sqrt(eps)` while `|a v_k|` stays at `eps |a|`.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let gram = (&a.dagger() * a).hermitian_part();
    let eig = hermitian_eig(&gram)?;
    let av = a.matmul(&eig.eigenvectors)?;
    Ok((0..av.cols())
        .map(|k| av.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .sum())
}
