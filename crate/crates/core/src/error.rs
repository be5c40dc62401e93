use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,

    /// The characteristic polynomial does not split over the rationals.
    #[error("characteristic polynomial does not split over Q")]
    IrrationalSpectrum,

    #[error("matrices do not anti-commute (AB + BA != 0)")]
    NotAntiCommuting,

    #[error("matrix does not lie in the anti-commutant of the nilpotent normal form")]
    NotInCommutant,

    #[error("pair is not generic for its component")]
    NotGeneric,

    #[error("invalid component triple (p={p}, m={m}, r={r}) for n={n}")]
    InvalidTriple { p: usize, m: usize, r: usize, n: usize },

    #[error("sampler exhausted {retries} retries while drawing {what}")]
    RetriesExhausted { what: String, retries: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
