use thiserror::Error;

/// Errors raised by the analysis library.
///
/// Every variant maps to exactly one machine-readable code via [`Error::code`];
/// front ends use that code as the stable part of their error envelopes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no sensor positions were given")]
    EmptyInput,
    #[error("sensor position {0} appears more than once")]
    DuplicatePositions(i64),
    #[error("sensor position {0} is negative; positions must be non-negative integers")]
    NegativePosition(i64),
    #[error("sensor position `{0}` is not an integer")]
    NonIntegerPosition(alloc::string::String),
    #[error("could not read `{0}` as a sensor position")]
    MalformedInput(alloc::string::String),
    #[error("aperture {aperture} exceeds the configured cap of {cap}")]
    ApertureTooLarge { aperture: u64, cap: u64 },
    #[error("operation needs at least {needed} sensors, array has {found}")]
    TooFewSensors { needed: usize, found: usize },
    #[error("position {0} is not a sensor of the array")]
    PositionNotInArray(u32),
    #[error("2FRA family needs N >= 6, got {0}")]
    NTooSmall(usize),
    #[error("scan rows do not cover a contiguous N range starting at 10 or later")]
    RangeNotContiguous,
    #[error("invalid range {from}..={to}")]
    InvalidRange { from: usize, to: usize },
    #[error("angle {0} deg is outside the open interval (-90, 90)")]
    AngleOutOfRange(f64),
    #[error("every sensor of the array has failed")]
    NoSurvivingSensors,
    #[error(
        "{sources} sources exceed the central contiguous coarray bound {bound} of the surviving array; \
         at most {bound} sources can be resolved"
    )]
    RankDeficient { sources: usize, bound: u32 },
    #[error("covariance estimate contains non-finite entries")]
    DegenerateCovariance,
    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),
}

impl Error {
    /// Stable machine code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EMPTY_INPUT",
            Error::DuplicatePositions(_) => "DUPLICATE_POSITIONS",
            Error::NegativePosition(_) => "NEGATIVE_POSITION",
            Error::NonIntegerPosition(_) => "NON_INTEGER_POSITION",
            Error::MalformedInput(_) => "MALFORMED_INPUT",
            Error::ApertureTooLarge { .. } => "APERTURE_TOO_LARGE",
            Error::TooFewSensors { .. } => "TOO_FEW_SENSORS",
            Error::PositionNotInArray(_) => "POSITION_NOT_IN_ARRAY",
            Error::NTooSmall(_) => "N_TOO_SMALL",
            Error::RangeNotContiguous => "RANGE_NOT_CONTIGUOUS",
            Error::InvalidRange { .. } => "INVALID_RANGE",
            Error::AngleOutOfRange(_) => "ANGLE_OUT_OF_RANGE",
            Error::NoSurvivingSensors => "NO_SURVIVING_SENSORS",
            Error::RankDeficient { .. } => "RANK_DEFICIENT",
            Error::DegenerateCovariance => "DEGENERATE_COVARIANCE",
            Error::InvalidScenario(_) => "INVALID_SCENARIO",
        }
    }

    /// True for errors caused by malformed user input (as opposed to inputs
    /// that parse but violate a domain rule).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyInput
                | Error::DuplicatePositions(_)
                | Error::NegativePosition(_)
                | Error::NonIntegerPosition(_)
                | Error::MalformedInput(_)
                | Error::ApertureTooLarge { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
