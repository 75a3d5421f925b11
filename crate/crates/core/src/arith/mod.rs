//! Exact integer and rational arithmetic.
//!
//! Everything above this layer works over [`BigRat`]: elements of `Q` and of
//! the localizations `Z[1/S]`. Matrices act on column vectors from the left;
//! the quantities used downstream (determinants, cokernel orders,
//! characteristic polynomials) are invariant under transposition, so results
//! agree with the right-action convention common in group theory.

mod matrix;
mod padic;
mod poly;
mod snf;

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

pub use matrix::{char_poly, det, mat_pow, IntMat};
pub use padic::{
    abs_archimedean, abs_padic, factorize, is_prime, padic_valuation, padic_valuation_or_inf,
    strip_primes, PadicVal, Prime, PRIMALITY_LIMIT,
};
pub use poly::{rational_roots, Poly};
pub use snf::{smith_normal_form, SmithForm};

/// Exact rational number. The denominator is always positive and coprime to
/// the numerator.
pub type BigRat = num_rational::BigRational;

/// Default bound on the bit length of any intermediate integer.
pub const DEFAULT_BIT_LIMIT: u64 = 1 << 20;

static BIT_LIMIT: AtomicU64 = AtomicU64::new(DEFAULT_BIT_LIMIT);

/// Current size guard, in bits.
pub fn bit_limit() -> u64 {
    BIT_LIMIT.load(Ordering::Relaxed)
}

/// Overrides the size guard for the whole process. Intended to be called once
/// at startup (the CLI reads `REIDZETA_BIT_LIMIT`).
pub fn set_bit_limit(bits: u64) {
    BIT_LIMIT.store(bits.max(64), Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("valuation of zero requested without the +inf convention")]
    ZeroArgument,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("matrix has non-integral entries")]
    NonIntegralMatrix,
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("intermediate integer of {bits} bits exceeds the limit of {limit} bits")]
    SizeLimitExceeded { bits: u64, limit: u64 },
    #[error("exponent must be positive")]
    InvalidExponent,
    #[error("matrix is singular")]
    Singular,
}

pub(crate) fn guard_int(x: &BigInt) -> Result<(), ArithError> {
    let limit = bit_limit();
    let bits = x.bits();
    if bits > limit {
        Err(ArithError::SizeLimitExceeded { bits, limit })
    } else {
        Ok(())
    }
}

pub(crate) fn guard_rat(x: &BigRat) -> Result<(), ArithError> {
    guard_int(x.numer())?;
    guard_int(x.denom())
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: impl Into<BigInt>) -> BigRat {
    BigRat::from_integer(n.into())
}

/// Shorthand for `num/den`; panics on a zero denominator.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRat {
    let den = den.into();
    assert!(!den.is_zero(), "zero denominator");
    BigRat::new(num.into(), den)
}
