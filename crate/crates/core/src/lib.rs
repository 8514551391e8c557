//! Exact and high-precision tools for the unitary-divisor Redheffer matrix:
//! its determinant (a unitary Mertens value), its characteristic polynomial
//! through set-partition sums, the multiplicity of eigenvalue 1, and the two
//! dominant real eigenvalues against their asymptotic forms.

pub mod arith;
pub mod charpoly;
pub mod config;
pub mod dd;
pub mod error;
pub mod matrix;
pub mod spectral;
pub mod verify;

pub use config::{Guards, RunConfig, Tolerances};
pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
