use num_bigint::BigInt;
use thiserror::Error;

/// Every failure the library can report.
///
/// Variants that certify a mathematical fact (`NotCubeMod`) are kept apart
/// from resource failures (`FactorTimeout`, `IterationCap`, `PrecisionExhausted`)
/// so the CLI can map them onto distinct exit codes.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("factoring budget exhausted while splitting {0}")]
    FactorTimeout(BigInt),
    #[error("{a} is not a cube modulo the prime {q}")]
    NotCubeMod { a: BigInt, q: BigInt },
    #[error("descent exceeded {0} iterations")]
    IterationCap(usize),
    #[error("real root isolation failed at the maximum precision")]
    PrecisionExhausted,
    #[error("rational root found at ({u}, {v})")]
    RationalRootFound { u: BigInt, v: BigInt },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("denominator vanished: the radicand is a cube")]
    DegenerateDenominator,
    #[error("radicand {from} cannot be rebased to {to}")]
    IncompatibleRadicand { from: BigInt, to: BigInt },
    #[error("unwinding produced a wrong norm at step {0}")]
    ChainVerificationFailed(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid tower pair: {0}")]
    InvalidTower(String),
    #[error("relative norm does not match the Selmer element")]
    NormMismatch,
    #[error("cube test was inconclusive")]
    CubeTestInconclusive,
    #[error("vertical tangent at the given point")]
    VerticalTangent,
    #[error("no Hensel lift from the given seed")]
    NoLift,
    #[error("insufficient p-adic precision")]
    InsufficientPrecision,
    #[error("argument is not a unit in the residue field")]
    NotUnit,
    #[error("local point search exhausted at p = {0}")]
    SearchExhausted(BigInt),
    #[error("local point does not lift generator {index} at p = {p}")]
    WrongLocalPoint { index: usize, p: BigInt },
    #[error("pairing matrix is not alternating")]
    NotAlternating,
    #[error("unsupported local structure at p = {0}: {1}")]
    UnsupportedLocal(BigInt, String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
