use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {entries} entries cannot form a dim x dim matrix")]
    NotSquare { entries: usize },

    #[error("matrix is not Hermitian (max |M_ij - conj(M_ji)| = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace deviates from one (trace = {trace:.15})")]
    TraceDeviation { trace: f64 },

    #[error("Hermitian eigendecomposition did not converge")]
    EigenFailure,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {dim} for {operation}")]
    UnsupportedDimension { dim: usize, operation: &'static str },

    #[error("state has no weight on the reference basis")]
    DegenerateState,

    #[error("adaptive quadrature did not reach tolerance {tol:.1e} on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64, tol: f64 },

    #[error("trajectory node {node} at t = {t} left the density-matrix tolerance band: {source}")]
    ValidationFailure {
        node: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("grid too coarse: {nodes} nodes, need at least {required}")]
    GridTooCoarse { nodes: usize, required: usize },

    #[error("node index {index} out of range for a grid of {nodes} nodes")]
    NodeOutOfRange { index: usize, nodes: usize },

    #[error("eigenvalue tracking failed at node {node}: {reason}")]
    EigenTrackingFailure { node: usize, reason: &'static str },

    #[error("singular input: {0}")]
    SingularInput(&'static str),

    #[error("zero average speed with nonzero coherence change {delta_c:.3e}")]
    ZeroSpeed { delta_c: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
