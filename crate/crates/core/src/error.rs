use core::fmt;

/// Errors for every operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// `p` failed the deterministic primality test.
    NotPrime(u64),
    /// `p^r` does not fit the 64-bit arithmetic width.
    CapacityExceeded { p: u64, r: u32 },
    /// An enumeration-scale operation was asked for a domain larger than the
    /// configured table limit.
    TableLimitExceeded { q: u64, limit: u64 },
    /// Multiplicative inverse of zero.
    DivisionByZero,
    /// Elements from different fields were mixed in one operation.
    FieldMismatch,
    /// A canonical code was outside `[0, q)`.
    CodeOutOfRange { code: u64, q: u64 },
    /// An `(m, n)` range with `m >= n`, or a parameter outside its domain.
    BadRange(&'static str),
    /// A quadratic-normalization operation in characteristic 2.
    CharacteristicTwo { p: u64 },
    /// Exact rational mode requested beyond the supported depth.
    ExactnessHorizon { n: u32, max: u32 },
    /// The requested exact computation would exceed the memory budget.
    ExactSizeExceeded { bits: u64, limit: u64 },
    /// A theorem evaluator was called without a parameter it needs.
    MissingParam(&'static str),
    /// A threshold scan found no index in the window past which the
    /// inequality holds everywhere.
    NoThresholdInWindow,
    /// An empirical quantity was compared against a theorem with a different
    /// left-hand side.
    ShapeMismatch { expected: &'static str, got: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::CapacityExceeded { p, r } => {
                write!(f, "{p}^{r} exceeds 64-bit arithmetic capacity")
            }
            Error::TableLimitExceeded { q, limit } => {
                write!(f, "domain size {q} exceeds the table limit {limit}")
            }
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::FieldMismatch => write!(f, "operands belong to different fields"),
            Error::CodeOutOfRange { code, q } => {
                write!(f, "code {code} out of range for a field of order {q}")
            }
            Error::BadRange(what) => write!(f, "bad range: {what}"),
            Error::CharacteristicTwo { p } => {
                write!(f, "operation requires odd characteristic, got p = {p}")
            }
            Error::ExactnessHorizon { n, max } => {
                write!(f, "exact rational mode is limited to n <= {max}, got n = {n}")
            }
            Error::ExactSizeExceeded { bits, limit } => {
                write!(f, "exact value would need ~{bits} bits (limit {limit})")
            }
            Error::MissingParam(name) => write!(f, "missing parameter: {name}"),
            Error::NoThresholdInWindow => write!(f, "no stable threshold in the scan window"),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "empirical shape mismatch: theorem bounds {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
