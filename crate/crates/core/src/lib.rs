//! Coherence orders of N-qubit density matrices.
//!
//! * [`operator_basis`]: product-operator expansion in `{I_0, I_+, I_-, I_z}`.
//! * [`coherence`]: order sectors `rho_m` and their quantifiers.
//! * [`dephasing`]: exact and sampled Gaussian dephasing channels.
//! * [`metrology`]: quantum Fisher information, squared speed and the
//!   multiple-quantum bounds built from the order sectors.
//!
//! Qubit 1 is the leftmost tensor factor and the most significant bit of a
//! basis index; `|0>` is the `+1/2` eigenstate of `I_z`.

pub mod coherence;
pub mod dephasing;
pub mod error;
pub mod linalg;
pub mod metrology;
pub mod operator_basis;
pub mod tolerances;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
