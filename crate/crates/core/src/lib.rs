//! Secure data aggregation for wireless sensor networks.
//!
//! Two independent security layers:
//!
//! * an additively homomorphic cryptosystem over a supersingular elliptic
//!   curve (one multiplication via the modified Weil pairing), together
//!   with an aggregation-tree simulator and an RSA energy baseline;
//! * a watermarking layer for node authentication, based on chaotic
//!   iterations driven by a piecewise linear chaotic map, with
//!   spread-spectrum baselines and a standard attack suite.

pub mod aggregation;
pub mod bgn;
pub mod ec;
pub mod error;
pub mod numeric;
pub mod watermark;

pub use error::Error;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
