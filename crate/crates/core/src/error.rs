use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("structure constants are not associative on basis triple ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),

    #[error("claimed unit fails the unit law on basis element {0}")]
    NotAUnit(usize),

    #[error("involution is not involutive on basis element {0}")]
    InvolutionNotInvolutive(usize),

    #[error("involution is not anti-multiplicative on basis pair ({0}, {1})")]
    InvolutionNotAntiMultiplicative(usize, usize),

    #[error("involution does not fix the unit")]
    InvolutionMovesUnit,

    #[error("quaternion parameter must be nonzero")]
    ZeroParameter,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("algebra has no unit")]
    MissingUnit,

    #[error("algebra has no involution")]
    MissingInvolution,

    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("vertex {vertex} out of range 1..={r}")]
    VertexOutOfRange { vertex: usize, r: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid cover at vertex {vertex}: {reason}")]
    InvalidCover { vertex: usize, reason: String },

    #[error("invalid specialisation map: {0}")]
    InvalidMap(String),

    #[error("no generator found after {tries} tries")]
    GeneratorNotFound { tries: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at position {pos}: {message}")]
    Parse { pos: usize, message: String },

    #[error("term `{term}` is not multihomogeneous of degree {expected:?}")]
    Inhomogeneous { term: String, expected: Vec<u32> },

    #[error("invalid projective point (0:0)")]
    InvalidPoint,

    #[error("invalid descriptor: {0}")]
    Descriptor(String),
}
