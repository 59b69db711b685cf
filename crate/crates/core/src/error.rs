use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count k={k} outside supported range {min}..={max}")]
    QubitCountOutOfRange { k: u32, min: u32, max: u32 },

    #[error("operands live on different geometries: N={left} vs N={right}")]
    GeometryMismatch { left: usize, right: usize },

    #[error("state is not normalized: |psi| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("operator is not Hermitian: max |rho - rho^dag| = {residual}")]
    NotHermitian { residual: f64 },

    #[error("operator trace differs from one: trace = {trace}")]
    TraceNotOne { trace: f64 },

    #[error("amplitude vector has length {len}, geometry requires {expected}")]
    DimensionMismatch { len: usize, expected: usize },

    #[error("noise strength epsilon = {epsilon} outside {context}")]
    EpsilonOutOfRange { epsilon: f64, context: &'static str },

    #[error("noise kernel weight {weight} is negative beyond tolerance; epsilon/N combination is invalid")]
    KernelNegativity { weight: f64 },

    #[error("qubit subset mask {mask:#b} must be nonempty and proper for k={k}")]
    InvalidSubset { mask: usize, k: u32 },

    #[error("convex-roof search limited to k <= {max_k} and rank <= {max_rank}; got k={k}, rank={rank}")]
    OptimizerSizeGuard {
        k: u32,
        rank: usize,
        max_k: u32,
        max_rank: usize,
    },

    #[error("trajectory ensemble needs at least 2 trajectories, got {got}")]
    TooFewTrajectories { got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
