use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates an operation's precondition.
    InvalidArgument(&'static str),
    /// A grid operation left its valid range or grids do not line up.
    Domain(&'static str),
    /// A ratio with a (numerically) vanishing denominator was requested.
    DivisionHazard(&'static str),
    /// The postselection probability is below the representable threshold.
    PostselectionImpossible { probability: f64 },
    /// An inversion has no positive solution.
    NoSolution(&'static str),
}

impl Error {
    /// Short machine-readable kind, used by the CLI error reporter.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Domain(_) => "domain",
            Error::DivisionHazard(_) => "division-hazard",
            Error::PostselectionImpossible { .. } => "postselection-impossible",
            Error::NoSolution(_) => "no-solution",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DivisionHazard(msg) => write!(f, "division hazard: {msg}"),
            Error::PostselectionImpossible { probability } => {
                write!(f, "postselection numerically impossible (probability {probability:e})")
            }
            Error::NoSolution(msg) => write!(f, "no solution: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
