//! Exact computations with vector bundles on projective space presented by
//! monads of sums of line bundles.

pub mod certify;
pub mod cohomology;
pub mod complex;
pub mod field;
pub mod graded;
pub mod io;
pub mod matrix;
pub mod par;
pub mod p1split;
pub mod projective;
pub mod scanners;
pub mod verify;
pub mod zoo;

pub use complex::{FormMatrix, MonadSpec, TwistList};
pub use field::{Field, FieldSpec, PrimeField, Rationals};
pub use graded::{Form, LinearSubspace};
pub use matrix::Mat;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("search exhausted: {0}")]
    Exhausted(String),
}
