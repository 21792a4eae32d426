//! Error type shared by all modules of the crate.

/// Everything that can go wrong when validating inputs or running a computation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix entries must be finite (no NaN or infinity)")]
    NonFiniteEntry,
    #[error("matrix dimensions must be positive")]
    ZeroDimension,
    #[error("entry count {len} does not match a {rows}x{cols} matrix")]
    EntryCount { rows: usize, cols: usize, len: usize },
    #[error("shape mismatch: left operand is {left_rows}x{left_cols}, right operand is {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not unitary: max deviation {deviation:.3e} exceeds tolerance {tolerance:.1e}")]
    NotUnitary { deviation: f64, tolerance: f64 },
    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,
    #[error("eigenvalue modulus {modulus} departs from the unit circle beyond 1e-9")]
    EigenOffUnitCircle { modulus: f64 },
    #[error("state norm {norm} is not 1 within 1e-12")]
    StateNotNormalized { norm: f64 },
    #[error("need at least 2 samples, got {samples}")]
    TooFewSamples { samples: u64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("channel needs at least one Kraus operator")]
    EmptyKraus,
    #[error("Kraus operators do not sum to a trace-preserving channel: max deviation {deviation:.3e} exceeds 1e-9")]
    IncompleteKraus { deviation: f64 },
    #[error("probability {value} lies outside [0, 1]")]
    ProbabilityRange { value: f64 },
    #[error("decay exponent {value} must be finite and non-negative")]
    DecayRange { value: f64 },
    #[error("remix matrix must be {expected}x{expected} to act on {expected} Kraus operators, got {rows}x{cols}")]
    RemixShape { expected: usize, rows: usize, cols: usize },
    #[error("pad target {requested} is smaller than the current {current} Kraus operators")]
    PadShrink { requested: usize, current: usize },
    #[error("tensor power budget exceeded: dim^K = {dim_pow} (cap {dim_cap}), total Kraus entries = {entries} (cap {entry_cap})")]
    TensorBudget {
        dim_pow: u128,
        dim_cap: u128,
        entries: u128,
        entry_cap: u128,
    },
    #[error("density matrix is invalid: {reason}")]
    InvalidDensity { reason: String },
    #[error("subspace selector is invalid: {reason}")]
    InvalidSelector { reason: String },
    #[error("acceptance probability {q:.3e} is degenerate (at or below 1e-12)")]
    DegenerateAcceptance { q: f64 },
    #[error("single-copy fidelity {value} lies outside [{lower}, 1]")]
    FidelityRange { value: f64, lower: f64 },
    #[error("composite power K must be at least 1")]
    ZeroPower,
    #[error("error grid must list at least one amplitude scale and one detuning")]
    EmptyGrid,
    #[error("pulse sequence must contain at least one pulse")]
    EmptySequence,
    #[error("parameter {name} must be finite, got {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
