use thiserror::Error;

/// Errors shared across the combinatorial and numeric halves of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown or unsupported type label `{0}`")]
    UnknownType(String),

    #[error("weight {0:?} is not dominant")]
    NonDominant(Vec<String>),

    #[error("node subset {0:?} is empty or not connected in the Dynkin diagram")]
    BadSubset(Vec<usize>),

    #[error("node index {0} out of range for rank {1}")]
    NodeOutOfRange(usize, usize),

    #[error("crystals live over different root systems")]
    RootSystemMismatch,

    #[error("crystal is not normal: {0}")]
    NotNormal(String),

    #[error("involution verification failed: {0}")]
    InvolutionCheck(String),

    #[error("tree arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid tree or bracketing: {0}")]
    BadTree(String),

    #[error("chart evaluation failed: {0}")]
    BadChart(String),

    #[error("configuration points must be pairwise distinct")]
    CoincidentPoints,

    #[error("delta {delta} too large: must be below half the minimal gap {min_gap}")]
    DeltaTooLarge { delta: f64, min_gap: f64 },

    #[error("unsupported algebra tag `{0}` (expected sl2 or sl3)")]
    UnknownAlgebra(String),

    #[error("generator index pair ({0},{1}) invalid")]
    BadGenerator(usize, usize),

    #[error("operator family failed the commutativity bound: {0}")]
    NotCommuting(String),

    #[error("simple spectrum violation on block `{block}`: {detail}")]
    SimpleSpectrumViolation { block: String, detail: String },

    #[error("transport step collapse at t={t}: overlap {overlap} after {depth} halvings")]
    StepCollapse { t: f64, overlap: f64, depth: u32 },

    #[error("handoff fidelity {fidelity} below threshold {threshold} after {halvings} delta halvings")]
    FidelityFailure {
        fidelity: f64,
        threshold: f64,
        halvings: u32,
    },

    #[error("eigen residual {residual} exceeds tolerance {tol}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
