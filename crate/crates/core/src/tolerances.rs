//! Numerical thresholds shared by every module.
//!
//! Kept in one place so that tests and library code agree on what
//! "equal", "Hermitian" and "converged" mean.

/// Maximum entrywise deviation `|a_ij - conj(a_ji)|` (scaled by `max(1, max|a|)`)
/// accepted as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigenpair residual bound relative to the induced infinity norm.
pub const EIG_RESIDUAL_TOL: f64 = 1e-10;

/// Generic equality tolerance for derived scalar quantities.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Trace / positivity slack accepted when validating a density matrix.
pub const STATE_TOL: f64 = 1e-8;

/// Pairs of eigenvalues with `q_n + q_m` at or below this are dropped from the QFI sum.
pub const QFI_CUTOFF: f64 = 1e-12;

/// An order counts as populated when its multiple-quantum intensity exceeds this.
pub const MQI_EPS: f64 = 1e-12;

/// Sweep budget of the cyclic Jacobi eigensolver.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Register size cap. A full product-operator expansion holds `4^N` coefficients
/// (about 1M complex numbers, 16 MiB, at N = 10).
pub const MAX_QUBITS: usize = 10;

/// Multiply a QFI computed here by this to obtain the `4 Var(H)` convention
/// common in the metrology literature. Never applied implicitly.
pub const GHR_QFI_FACTOR: f64 = 4.0;
