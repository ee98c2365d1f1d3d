use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("map is not simplicial: {0}")]
    NotSimplicial(String),
    #[error("complex carries no monoid structure")]
    NoMonoidStructure,
    #[error("face leaves the complex: {0}")]
    FaceOutsideComplex(String),
    #[error("builder is not monotone in its bound: {0}")]
    NonMonotone(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("d^2 != 0 on {witness}")]
    DSquaredNonzero { witness: String },
    #[error("ambiguous: {0}")]
    Ambiguity(String),
    #[error("no consistent assignment survives")]
    NoSurvivor,
    #[error("inconsistent: {0}")]
    Inconsistent(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Resource,
    Consistency,
    Failure,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NotPrime(_)
            | Error::Parse(_)
            | Error::InvalidMorphism(_)
            | Error::InvalidMonoid(_)
            | Error::InvalidAlgebra(_)
            | Error::NotComposable(_)
            | Error::Unsupported(_) => ErrorClass::Usage,
            Error::WindowTooSmall(_) => ErrorClass::Resource,
            Error::DSquaredNonzero { .. }
            | Error::FaceOutsideComplex(_)
            | Error::NotSimplicial(_)
            | Error::Inconsistent(_)
            | Error::NonMonotone(_) => ErrorClass::Consistency,
            Error::NoMonoidStructure | Error::Ambiguity(_) | Error::NoSurvivor => ErrorClass::Failure,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
