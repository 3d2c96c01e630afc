use thiserror::Error;

use crate::io::FormatError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {p}^{e} exceeds the supported maximum of 2^16")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    BadModulus(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("the zero matrix does not span a subspace")]
    EmptySubspace,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{what} has {size} elements, above the cap of {cap}")]
    CapExceeded {
        what: String,
        size: String,
        cap: u64,
    },
    #[error("missing import slot `{0}`")]
    MissingImport(String),
    #[error("unknown recipe `{0}`")]
    UnknownRecipe(String),
    #[error("unsupported field size q={0}: {1}")]
    Unsupported(u32, String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
