//! Error types for every module, plus the crate-level [`Error`] used by the CLI.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("variable mismatch: {0}")]
    VarMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("series is not invertible: {0}")]
    NotInvertible(String),
    #[error("exp_series needs a zero constant term")]
    NonzeroConstant,
    #[error("negative exponents present in {0}")]
    NegativeExponents(String),
    #[error("binom_power needs constant term 1")]
    ConstantNotOne,
    #[error("substitution would need infinitely many terms: {0}")]
    InfiniteTerms(String),
    #[error("singular constant term")]
    Singular,
    #[error("precision window exhausted: {0}")]
    WindowExhausted(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupoidError {
    #[error("arrows are not composable: source of g2 is {s2}, target of g1 is {t1}")]
    NotComposable { s2: String, t1: String },
    #[error("point lies on the excluded curve 1 + u z^(k-1) = 0")]
    OutsideDomain,
    #[error("invalid twist order k = {0}")]
    InvalidK(u32),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error("input is not a 2x2 companion system: {0}")]
    NotCompanion(String),
    #[error("pole order {pole} is not n*q - (n-1) for n = {n} and any q >= 1")]
    EtaleViolated { pole: u32, n: u32 },
    #[error("anti-Stokes directions need pole order k >= 2")]
    AntiStokesUndefined,
    #[error("leading term is not diagonalizable")]
    NotDiagonalizable,
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResumError {
    #[error("resonance: linear system at order {order} is not uniquely solvable")]
    Resonance { order: usize },
    #[error("leading terms of model and system do not match in column {column}")]
    LeadingTermMismatch { column: usize },
    #[error("cancellation failure: entry ({row},{col}) keeps term {term} with coefficient {coeff}")]
    CancellationFailure {
        row: usize,
        col: usize,
        term: String,
        coeff: String,
    },
    #[error("irregular part of entry {entry} has degree {degree} > {bound}")]
    DegreeBound {
        entry: usize,
        degree: i64,
        bound: i64,
    },
    #[error("incompatible inputs: {0}")]
    Incompatible(String),
    #[error("evaluator failed: {0}")]
    Evaluator(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("step size underflow near z = {0}")]
    StepUnderflow(String),
    #[error("tolerance {0} is below the supported minimum 1e-13")]
    ToleranceUnachievable(f64),
    #[error("path passes within {distance} of a pole (minimum {min})")]
    PathTooClose { distance: f64, min: f64 },
    #[error("argument {0} outside the supported range")]
    OutOfRange(String),
    #[error("Ei is undefined at 0")]
    ZeroArgument,
    #[error("evaluator failed: {0}")]
    Evaluator(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Crate-level error. Each variant maps to a CLI exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Input(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Resum(#[from] ResumError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// 2 for malformed input, 3 for mathematical failure, 4 for tolerance failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Series(SeriesError::Parse(_) | SeriesError::InvalidWindow(_)) => 2,
            Error::Connection(ConnectionError::Series(SeriesError::Parse(_)) | ConnectionError::Invalid(_)) => 2,
            Error::Resum(ResumError::Series(SeriesError::Parse(_)) | ResumError::Incompatible(_)) => 2,
            Error::Groupoid(GroupoidError::InvalidK(_)) => 2,
            Error::Oracle(OracleError::PathTooClose { .. } | OracleError::OutOfRange(_)) => 2,
            Error::Tolerance(_) => 4,
            Error::Oracle(OracleError::ToleranceUnachievable(_)) => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
