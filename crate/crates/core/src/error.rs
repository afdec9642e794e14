use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("time {t} outside the available range [{min}, {max}]")]
    OutOfRange { t: f64, min: f64, max: f64 },

    #[error("integration diverged at t = {t}: non-finite amplitude")]
    Divergence { t: f64 },

    #[error("mode index n = {n} is a multiple of N = {n_legs}; cot(nπ/N) is singular")]
    SingularMode { n: i64, n_legs: usize },

    #[error("invalid mode index n = {n}: {reason}")]
    InvalidMode { n: i64, reason: &'static str },

    #[error(
        "oscillating bound states need N >= 3 coupling points (got N = {n_legs}); \
         for N = 2 cot(nπ/2) is either zero or infinite, so two dark modes cannot coexist"
    )]
    StructuralImpossibility { n_legs: usize },

    #[error(
        "pole search incomplete: found {found} roots but the argument principle counts {expected}"
    )]
    IncompleteSearch { found: usize, expected: i64 },

    #[error("pole set is empty")]
    EmptyPoleSet,

    #[error("dark pair (n1 = {n1}, n2 = {n2}) does not belong to the given parameters: {reason}")]
    PairMismatch { n1: i64, n2: i64, reason: String },
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }
}
