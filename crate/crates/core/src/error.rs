use thiserror::Error;

/// Errors produced by the algebra layer and the verification runner.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("precision must be at least 1, got {0}")]
    ZeroPrecision(u32),

    #[error("insufficient precision: need {needed}, have {have}")]
    InsufficientPrecision { needed: u32, have: u32 },

    #[error("residue {value} is out of range for F_{p}")]
    ResidueOutOfRange { value: u64, p: u64 },

    #[error("modulus {0} does not fit the machine-word coefficient ring")]
    ModulusTooLarge(String),

    #[error("variable mismatch: {0}")]
    VariableMismatch(String),

    #[error("chart violation: {0}")]
    ChartViolation(String),

    #[error("not a unit: {0}")]
    NonUnit(String),

    #[error("form of degree {degree} has no exterior derivative on a {dim}-dimensional chart")]
    TopDegree { degree: usize, dim: usize },

    #[error("chart obstruction: {0}")]
    ChartObstruction(String),

    #[error("inadmissible fiber: {0}")]
    InadmissibleFiber(String),

    #[error("gauge equation has no solution on the chart; residual witness: {witness}")]
    GaugeUnsolvable { witness: String },

    #[error("repeated eigenvalue modulo p: {0}")]
    RepeatedEigenvalue(String),

    #[error("characteristic polynomial does not split over the base ring: {0}")]
    RootNotInBase(String),

    #[error("matrix is not regular modulo p: {0}")]
    NotRegular(String),

    #[error("matrix is not invertible over the base ring: {0}")]
    NotInvertible(String),

    #[error("flow is not canonical: {0}")]
    NonCanonicalFlow(String),

    #[error("degenerate quartic: {0}")]
    DegenerateQuartic(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
