//! Exact linear algebra over ℤ, ℚ and F_p.

mod complex;
mod field;
pub mod lattice;
mod matrix;
mod ring;
mod snf;

pub use complex::{
    complex_homology, homology_basis, homology_map, validate_complex, ChainComplex, ChainMap, HomologyGroup,
    ValidationReport,
};
pub use field::{independent_columns, rank, rank_kernel, solve};
#[allow(unused_imports)]
pub(crate) use field::{Field, Fp};
pub use matrix::ExactMatrix;
pub use ring::{is_prime, mod_inverse, BaseRing, Scalar, MAX_PRIME};
pub use snf::{determinant, invariant_factors, snf, InvariantFactors, SnfResult};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactLaError {
    #[error("{0} is not a supported prime")]
    NotPrime(u64),
    #[error("base ring mismatch: {left} vs {right}")]
    BaseMismatch { left: BaseRing, right: BaseRing },
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("ragged dense input")]
    Ragged,
    #[error("value {0} is not integral")]
    NonIntegral(String),
    #[error("division by zero in the base ring")]
    DivisionByZero,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("{0} needs a field base")]
    NeedsField(&'static str),
    #[error("vector not in the image")]
    NotInImage,
    #[error("basis matrix does not have full column rank")]
    NotFullRank,
    #[error("not a complex at degree {degree}: {reason}")]
    NotAComplex { degree: i64, reason: String },
    #[error("not a chain map: square at degree {degree} does not commute")]
    NotAChainMap { degree: i64 },
}
