use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sequence entries must be positive (found 0 at position {position})")]
    NonPositiveEntry { position: usize },

    #[error("not a permutation of 1..{len}: {reason}")]
    NotAPermutation { len: usize, reason: String },

    #[error("inversion table entry a_{k} = {value} exceeds its bound {bound}")]
    InversionTableBound { k: usize, value: usize, bound: usize },

    #[error("a composition needs at least one part and every part must be positive")]
    InvalidComposition,

    #[error("cut point {point} lies outside 1..{total}")]
    CutPointOutOfRange { point: usize, total: usize },

    #[error("permutation {0} is not valleyless")]
    NotValleyless(String),

    #[error("series constant term {0} is not a unit (expected 1 or -1)")]
    NotAUnit(String),

    #[error("closed form is tabulated only for k <= 4 (got k = {0})")]
    NoClosedForm(usize),

    #[error("brute-force universe too large: {what} (cap {cap})")]
    CapExceeded { what: String, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
