use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("modulus mismatch: expected p={expected}, found p={found}")]
    ModulusMismatch { expected: usize, found: usize },

    #[error("no representative multiset for FP={fp:?} at p={p} satisfies the divisor condition")]
    RepresentativeNotFound { fp: Vec<usize>, p: usize },

    #[error("no admissible evolved target at p={p}")]
    NoAdmissibleTarget { p: usize },

    #[error("oracle refuses p={p}; bound is {bound}")]
    OracleOutOfRange { p: usize, bound: usize },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
