use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("metric is not symmetric at entry ({i},{j})")]
    MetricNotSymmetric { i: usize, j: usize },
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("tensor is not alternating in slots {slots:?} at index tuple {indices:?}")]
    NotAlternating {
        slots: Vec<usize>,
        indices: Vec<usize>,
    },
    #[error("{field} is not antisymmetric at index tuple {indices:?}")]
    NotAntisymmetric {
        field: &'static str,
        indices: Vec<usize>,
    },
    #[error("scaling factor must be nonzero")]
    ZeroScale,
    #[error("subspace is not closed under commutator: bracket of basis vectors {i} and {j} escapes")]
    NotSubalgebra { i: usize, j: usize },
    #[error("structure constants violate antisymmetry at ({a},{b})")]
    StructureNotAntisymmetric { a: usize, b: usize },
    #[error("structure constants violate the Jacobi identity at ({a},{b},{c})")]
    JacobiFailure { a: usize, b: usize, c: usize },
    #[error("designated subalgebra is not closed under the bracket (basis vectors {i}, {j})")]
    SubalgebraNotClosed { i: usize, j: usize },
    #[error("splitting rows do not complement the subalgebra (rank {rank}, expected {expected})")]
    BadSplitting { rank: usize, expected: usize },
    #[error("connection map does not extend the isotropy action (subalgebra basis vector {index})")]
    ConnectionNotIsotropy { index: usize },
    #[error("connection map is not equivariant at pair ({h_index},{g_index})")]
    ConnectionNotEquivariant { h_index: usize, g_index: usize },
    #[error("isotropy representation is not faithful")]
    NonFaithfulIsotropy,
    #[error("subalgebra conditions fail: {0}")]
    SubalgebraConditions(String),
    #[error("bracket closure failure while assembling the transvection algebra")]
    ClosureFailure,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("family parameters invalid: {0}")]
    BadParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
