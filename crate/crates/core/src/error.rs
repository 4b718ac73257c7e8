use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("vector is not in the row space of the generator")]
    NoSolution,
    #[error("matrix is not invertible over GF(2)")]
    NotInvertible,
    #[error("adjacency matrix is not symmetric")]
    NotSymmetric,
    #[error("adjacency matrix has a nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),
    #[error("qubit {0} has already been measured out")]
    DeadQubit(usize),
    #[error("control and target are the same qubit ({0})")]
    SameQubit(usize),
    #[error("gamma matrix for layer {layer} has rank {rank} < k = {k}")]
    RankDeficientGamma { layer: usize, rank: usize, k: usize },
    #[error("cnot ({control}, {target}) is not contained in layer {layer}")]
    CrossLayerCnot {
        layer: usize,
        control: usize,
        target: usize,
    },
    #[error("invalid branch vector: {0}")]
    InvalidBranchVector(String),
    #[error("tree with {0} physical qubits is too large for exhaustive enumeration")]
    TreeTooLarge(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("lengths must be strictly positive")]
    NonpositiveLength,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("infeasible regular degree profile: {0}")]
    InfeasibleDegree(String),
    #[error("parity-check matrix has a trivial null space")]
    RankDeficientParity,
    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),
    #[error("invalid emission ordering: {0}")]
    InvalidOrdering(String),
    #[error("simulation too large: {0}")]
    SizeGuard(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
