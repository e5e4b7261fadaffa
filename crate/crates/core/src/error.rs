use thiserror::Error;

use crate::linalg::Layer;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base characteristic {0} is not a prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {q}^{m} exceeds the 2^20 element cap")]
    FieldTooLarge { q: u32, m: usize },
    #[error("modulus must be monic of degree {expected}, got {got} coefficients")]
    BadModulus { expected: usize, got: usize },
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u32),
    #[error("digit {digit} out of range for GF({q})")]
    DigitOutOfRange { digit: u32, q: u32 },
    #[error("element index {index} out of range for a field of order {order}")]
    ElementOutOfRange { index: u32, order: u32 },
    #[error("operands belong to different field towers")]
    TowerMismatch,
    #[error("layer mismatch: expected {expected:?}, got {got:?}")]
    LayerMismatch { expected: Layer, got: Layer },
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("evaluation points are linearly dependent over the base field")]
    DependentPoints,
    #[error("extension degree m = {m} is smaller than the code length n = {n}")]
    PacketTooShort { m: usize, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("enumeration of {requested} states exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: u128 },
    #[error("no codeword within the error budget")]
    NoCandidate,
    #[error("more than one codeword within the error budget")]
    Ambiguous,
    #[error("decoding failure: {0}")]
    DecodingFailure(String),
    #[error("transfer matrix rank {rank} is below the required {required}")]
    RankDeficient { rank: usize, required: usize },
    #[error("topology contains a cycle")]
    CyclicTopology,
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("no receivers declared")]
    NoReceivers,
    #[error("unknown edge index {0}")]
    UnknownEdge(usize),
    #[error("adversary exceeds its budget: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported format version {0}")]
    FormatVersion(u32),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
