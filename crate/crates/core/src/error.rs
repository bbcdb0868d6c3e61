use thiserror::Error;

/// Errors shared by every layer of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element is not invertible modulo the given prime")]
    NonInvertible,
    #[error("value is not a quadratic residue modulo the given prime")]
    NotAResidue,
    #[error("the point at infinity has no compressed form")]
    CannotCompressInfinity,
    #[error("compressed point does not decode to a curve point")]
    InvalidCompressedPoint,
    #[error("pairing evaluation stayed degenerate after the retry budget")]
    PairingDegenerate,
    #[error("message {0} exceeds the configured plaintext bound {1}")]
    MessageOutOfRange(String, String),
    #[error("no discrete logarithm within the message bound (overflow or corruption)")]
    DlogNotFound,
    #[error("ciphertext levels do not match the requested operation")]
    LevelMismatch,
    #[error("discrete-log table would exceed the configured cap of {0} entries")]
    TableTooLarge(u64),
    #[error("key generation failed after the retry budget: {0}")]
    GenerationFailure(String),
    #[error("malformed PGM input: {0}")]
    MalformedPgm(String),
    #[error("significance thresholds overlap: m must be below M")]
    OverlappingThresholds,
    #[error("host vector is orthogonal to a carrier; NW modulation undefined")]
    DegenerateHost,
    #[error("malformed key or ciphertext file: {0}")]
    MalformedKey(String),
    #[error("malformed topology file: {0}")]
    MalformedTopology(String),
    #[error("readings do not match the topology: {0}")]
    ReadingsMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
