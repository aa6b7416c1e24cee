use thiserror::Error;

/// Failures raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {0} is not a power of two")]
    DimensionNotPowerOfTwo(usize),
    #[error("coherence order {m} out of range for {n_qubits} qubit(s)")]
    OrderOutOfRange { m: i64, n_qubits: usize },
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("noise model topology does not match the requested channel: {0}")]
    TopologyMismatch(&'static str),
    #[error("invalid noise model: {0}")]
    InvalidModel(String),
    #[error("time grid is empty")]
    EmptyGrid,
    #[error("encoded phase must be non-zero")]
    ZeroTau,
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("unknown example {0} (expected 1..=5)")]
    UnknownExample(u8),
    #[error("too many qubits: {0} (limit {max})", max = crate::tolerances::MAX_QUBITS)]
    TooManyQubits(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
