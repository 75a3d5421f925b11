//! Coincidence Reidemeister numbers.
//!
//! For `G = Z[1/S]^d` the difference `psi - phi` has image of index
//! `|det|_∞ · ∏_{p ∈ S} |det|_p` whenever the determinant is nonzero. The
//! nilpotent case multiplies factor contributions, which requires every
//! factor to have a trivial coincidence set at the exponent in question.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{smith_normal_form, strip_primes, ArithError, IntMat};
use crate::group::{EndoPair, EndoSystem, NilpotentFactor, NilpotentGroupData, SArithAbelianGroup};
use crate::spectra::{joint_eigenvalues, SpectraError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("not tame: R(phi^{n}, psi^{n}) is infinite")]
    NotTameAt { n: u64 },
    #[error("factor {factor}: coincidence set of (phi^{n}, psi^{n}) is not a singleton")]
    HypothesisViolation { factor: usize, n: u64 },
    #[error("index {value} at n = {n} is not an integer; input lies outside Z[1/S]")]
    NonIntegerResult { n: u64, value: String },
    #[error("exponent must be positive")]
    InvalidExponent,
}

/// A Reidemeister number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RValue {
    Finite(BigUint),
    Infinite,
}

impl RValue {
    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            RValue::Finite(v) => Some(v),
            RValue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RValue::Infinite)
    }
}

impl fmt::Display for RValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RValue::Finite(v) => write!(f, "{v}"),
            RValue::Infinite => write!(f, "infinite"),
        }
    }
}

/// `psi^n - phi^n`
pub fn difference(pair: &EndoPair, n: u64) -> Result<IntMat, ArithError> {
    if n == 0 {
        return Err(ArithError::InvalidExponent);
    }
    pair.psi.pow(n)?.sub(&pair.phi.pow(n)?)
}

/// `R(phi^n, psi^n)` on `Z[1/S]^d`.
pub fn abelian_r(group: &SArithAbelianGroup, pair: &EndoPair, n: u64) -> Result<RValue, EngineError> {
    if n == 0 {
        return Err(EngineError::InvalidExponent);
    }
    let det = difference(pair, n)?.det()?;
    if det.is_zero() {
        return Ok(RValue::Infinite);
    }
    let primes = group.inverted_primes();
    let num = strip_primes(det.numer(), primes).abs();
    let den = strip_primes(det.denom(), primes);
    if !den.is_one() {
        return Err(EngineError::NonIntegerResult { n, value: format!("{num}/{den}") });
    }
    Ok(RValue::Finite(num.to_biguint().expect("nonnegative")))
}

/// Order of the cokernel of an integral square matrix via its Smith form;
/// `None` when the cokernel is infinite.
pub fn cokernel_order(m: &IntMat) -> Result<Option<BigUint>, ArithError> {
    let inv = smith_normal_form(m)?.invariants();
    let prod: BigInt = inv.iter().product();
    if prod.is_zero() || inv.len() < m.rows() {
        return Ok(None);
    }
    Ok(prod.to_biguint())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TameMode {
    /// Decide from the joint rational spectrum.
    Exact,
    /// Scan `det(psi^n - phi^n)` for `n <= N`.
    Horizon(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tameness {
    Tame,
    NotTame { n: u64 },
    /// No zero determinant up to the horizon.
    Unknown { checked_up_to: u64 },
}

/// For rational eigenvalues `xi^n = eta^n` happens for some `n` only when
/// `xi = eta` (then at `n = 1`) or `xi = -eta` (then at `n = 2`).
pub fn tameness_check(
    group: &SArithAbelianGroup,
    pair: &EndoPair,
    mode: TameMode,
) -> Result<Tameness, EngineError> {
    match mode {
        TameMode::Exact => {
            let _ = group;
            let pairs = joint_eigenvalues(pair)?;
            if pairs.iter().any(|p| p.xi == p.eta) {
                return Ok(Tameness::NotTame { n: 1 });
            }
            if pairs.iter().any(|p| p.xi == -p.eta.clone()) {
                return Ok(Tameness::NotTame { n: 2 });
            }
            Ok(Tameness::Tame)
        }
        TameMode::Horizon(limit) => {
            for n in 1..=limit {
                if difference(pair, n)?.det()?.is_zero() {
                    return Ok(Tameness::NotTame { n });
                }
            }
            Ok(Tameness::Unknown { checked_up_to: limit })
        }
    }
}

/// `Coin(phi_k, psi_k)` is trivial.
pub fn coincidence_singleton(factor: &NilpotentFactor) -> bool {
    singleton_at(factor, 1).unwrap_or(false)
}

fn singleton_at(factor: &NilpotentFactor, n: u64) -> Result<bool, ArithError> {
    Ok(!difference(factor.pair(), n)?.det()?.is_zero())
}

/// Product of the factor numbers. Every factor must have a trivial
/// coincidence set for `(phi_k^n, psi_k^n)`; this is re-checked for each `n`.
pub fn nilpotent_r(data: &NilpotentGroupData, n: u64) -> Result<RValue, EngineError> {
    if n == 0 {
        return Err(EngineError::InvalidExponent);
    }
    for (k, factor) in data.factors().iter().enumerate() {
        if !singleton_at(factor, n)? {
            return Err(EngineError::HypothesisViolation { factor: k + 1, n });
        }
    }
    let mut prod = BigUint::one();
    for factor in data.factors() {
        match abelian_r(factor.group(), factor.pair(), n)? {
            RValue::Finite(v) => prod *= v,
            RValue::Infinite => return Ok(RValue::Infinite),
        }
    }
    Ok(RValue::Finite(prod))
}

/// `R(phi^n, psi^n)` for either kind of input.
pub fn system_r(system: &EndoSystem, n: u64) -> Result<RValue, EngineError> {
    match system {
        EndoSystem::Abelian(f) => abelian_r(f.group(), f.pair(), n),
        EndoSystem::Nilpotent(data) => nilpotent_r(data, n),
    }
}

/// `R_1, ..., R_N`. Fails with the smallest `n` whose number is infinite.
/// A factor with a nontrivial coincidence set at `n` makes `R(phi^n, psi^n)`
/// infinite, so it is reported the same way.
pub fn r_sequence(system: &EndoSystem, horizon: u64) -> Result<Vec<BigUint>, EngineError> {
    let values: Vec<Result<RValue, EngineError>> =
        (1..=horizon).into_par_iter().map(|n| system_r(system, n)).collect();
    let mut out = Vec::with_capacity(values.len());
    for (i, v) in values.into_iter().enumerate() {
        let n = i as u64 + 1;
        match v {
            Ok(RValue::Finite(r)) => out.push(r),
            Ok(RValue::Infinite) | Err(EngineError::HypothesisViolation { .. }) => {
                return Err(EngineError::NotTameAt { n })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
