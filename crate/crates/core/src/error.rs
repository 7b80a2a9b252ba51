use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every stage of the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    Validation(String),
    /// Two polynomials from different coefficient rings were combined.
    ModeMismatch,
    /// A negative exponent was requested in the polynomial ring R⁺.
    Localization(String),
    /// An element that must lie in Q_{≥1} does not.
    Filtration(String),
    /// Inhomogeneous element where a single degree is required.
    Degree(String),
    /// Arity beyond the structure's maximum.
    Arity { requested: usize, max: usize },
    /// A generator id is not in the basis.
    UnknownGenerator(String),
    /// A model constraint (formal vanishing, 𝒫 law, ...) is violated.
    Model(String),
    /// A differential or chain map fails d² = 0 / d∘f = f∘d.
    Chain(String),
    /// A pipeline stage failed.
    Stage { stage: String, witness: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(m) => write!(f, "validation error: {m}"),
            Error::ModeMismatch => write!(f, "coefficient mode mismatch (R+ vs R)"),
            Error::Localization(m) => write!(f, "negative exponent in R+: {m}"),
            Error::Filtration(m) => write!(f, "filtration error: {m}"),
            Error::Degree(m) => write!(f, "degree error: {m}"),
            Error::Arity { requested, max } => {
                write!(f, "arity {requested} exceeds maximum arity {max}")
            }
            Error::UnknownGenerator(id) => write!(f, "unknown generator `{id}`"),
            Error::Model(m) => write!(f, "model violation: {m}"),
            Error::Chain(m) => write!(f, "chain condition violated: {m}"),
            Error::Stage { stage, witness } => write!(f, "stage `{stage}` failed: {witness}"),
        }
    }
}

impl core::error::Error for Error {}
