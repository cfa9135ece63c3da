use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot add forms of degree {left} and {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("division is not exact")]
    InexactDivision,
    #[error("form has {found} coefficients, expected {expected}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("entry ({row}, {col}) must have degree {expected}, found {found}")]
    EntryDegree { row: usize, col: usize, expected: i64, found: i64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("Higgs field entry ({row}, {col}) must have degree {expected}, found {found}")]
    HolomorphyViolation { row: usize, col: usize, expected: i64, found: i64 },
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("line-bundle degree {l} is below the configured minimum {min}")]
    LineDegreeTooSmall { l: i64, min: i64 },
    #[error("columns are linearly dependent over the function field")]
    RankDeficient,
    #[error("a subbundle needs at least one column")]
    EmptyBasis,
    #[error("basis is not saturated")]
    NotSaturated,
    #[error("map does not factor through the subbundle")]
    NotFactorable,
    #[error("Higgs field is not nilpotent")]
    NotNilpotent,
    #[error("rank must be positive")]
    ZeroRank,
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("wrong shape: {0}")]
    WrongShape(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported Hodge bundle type {0:?}")]
    UnsupportedType(Vec<usize>),
    #[error("slope equality mu(E/E2 + E3) = mu(E): no limit is assigned")]
    BoundaryCase,
    #[error("flow diverges: block ({row}, {col}) carries z^{exponent}")]
    Divergent { row: usize, col: usize, exponent: i64 },
    #[error("no instance found after {0} attempts")]
    ExhaustedAttempts(u32),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Stable identifier printed by the command-line tool.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegreeMismatch { .. } => "DegreeMismatch",
            Error::InexactDivision => "InexactDivision",
            Error::CoefficientCount { .. } => "CoefficientCount",
            Error::EntryDegree { .. } => "EntryDegree",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::HolomorphyViolation { .. } => "HolomorphyViolation",
            Error::InvalidBundle(_) => "InvalidBundle",
            Error::LineDegreeTooSmall { .. } => "LineDegreeTooSmall",
            Error::RankDeficient => "RankDeficient",
            Error::EmptyBasis => "EmptyBasis",
            Error::NotSaturated => "NotSaturated",
            Error::NotFactorable => "NotFactorable",
            Error::NotNilpotent => "NotNilpotent",
            Error::ZeroRank => "ZeroRank",
            Error::ZeroScalar => "ZeroScalar",
            Error::WrongShape(_) => "WrongShape",
            Error::Unsupported(_) => "Unsupported",
            Error::UnsupportedType(_) => "UnsupportedType",
            Error::BoundaryCase => "BoundaryCase",
            Error::Divergent { .. } => "Divergent",
            Error::ExhaustedAttempts(_) => "ExhaustedAttempts",
            Error::InvalidParams(_) => "InvalidParams",
            Error::Internal(_) => "Internal",
        }
    }
}
