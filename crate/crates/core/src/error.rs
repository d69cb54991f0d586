use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NotPrime(u64),

    #[error("kernel index r must be at least 1")]
    ZeroKernelIndex,

    #[error("{operation} requires {expected}, got p = {p}")]
    WrongCharacteristic {
        operation: &'static str,
        expected: &'static str,
        p: u64,
    },

    #[error("malformed digit equation: {0}")]
    MalformedEquation(String),

    #[error("intermediate value exceeds 128-bit range ({0})")]
    TooLarge(&'static str),

    #[error("oracle refused: about {estimated} tuples expected, threshold is {threshold} (use force)")]
    OracleRefused { estimated: u64, threshold: u64 },

    #[error("degree {degree} lies beyond the truncation bound {bound}")]
    BeyondTruncation { degree: u64, bound: u64 },

    #[error("truncated series with different bounds ({0:?} vs {1:?}) cannot be compared")]
    TruncationMismatch(Option<u64>, Option<u64>),

    #[error("subtraction would produce a negative coefficient at weight {0}")]
    NegativeCoefficient(i64),

    #[error("invalid table spec: {0}")]
    InvalidTable(String),

    #[error("parse error: {0}")]
    Parse(String),
}
