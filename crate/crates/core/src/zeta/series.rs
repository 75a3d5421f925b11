use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{BigRat, Poly};

/// Truncated coefficients `a_0, ..., a_M` of `Z(s) = exp(Σ R_n s^n / n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaSeries {
    coefficients: Vec<BigRat>,
}

impl ZetaSeries {
    /// Panics unless `coefficients[0] == 1`.
    pub fn new(coefficients: Vec<BigRat>) -> Self {
        assert!(coefficients.first().is_some_and(|a| a.is_one()), "a_0 must be 1");
        ZetaSeries { coefficients }
    }

    pub fn coefficients(&self) -> &[BigRat] {
        &self.coefficients
    }

    /// Highest index `M` present.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Inverts the logarithmic-derivative recurrence:
    /// `R_m = m a_m - Σ_{k<m} R_k a_{m-k}`.
    pub fn recover_numbers(&self) -> Vec<BigRat> {
        let a = &self.coefficients;
        let mut r: Vec<BigRat> = Vec::with_capacity(a.len().saturating_sub(1));
        for m in 1..a.len() {
            let mut v = BigRat::from_integer(BigInt::from(m)) * &a[m];
            for k in 1..m {
                v -= &r[k - 1] * &a[m - k];
            }
            r.push(v);
        }
        r
    }
}

impl fmt::Display for ZetaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(s^{})", Poly::new(self.coefficients.clone()), self.coefficients.len())
    }
}

/// Converts a sequence of counts to rationals.
pub fn counts_to_rats(r: &[BigUint]) -> Vec<BigRat> {
    r.iter().map(|x| BigRat::from_integer(BigInt::from(x.clone()))).collect()
}

/// `a_0, ..., a_N` from `R_1, ..., R_N` via `m a_m = Σ_{k=1}^m R_k a_{m-k}`.
pub fn zeta_coefficients(r: &[BigRat]) -> ZetaSeries {
    let mut a = Vec::with_capacity(r.len() + 1);
    a.push(BigRat::one());
    for m in 1..=r.len() {
        let mut acc = BigRat::zero();
        for k in 1..=m {
            acc += &r[k - 1] * &a[m - k];
        }
        a.push(acc / BigRat::from_integer(BigInt::from(m)));
    }
    ZetaSeries { coefficients: a }
}

/// Coefficients of `Z*(s) = Σ_{n≥1} R_n s^n`, starting from the constant term 0.
pub fn zstar_series(r: &[BigRat]) -> Vec<BigRat> {
    if r.is_empty() {
        return Vec::new();
    }
    std::iter::once(BigRat::zero()).chain(r.iter().cloned()).collect()
}

/// Coefficients of `(1 - w s)^{-c}` up to `s^{len-1}`, from
/// `t_k = t_{k-1} w (c + k - 1) / k`.
fn binomial_series(w: &BigRat, c: &BigInt, len: usize) -> Vec<BigRat> {
    let mut out = Vec::with_capacity(len);
    let mut t = BigRat::one();
    for k in 0..len {
        if k > 0 {
            let k_big = BigInt::from(k);
            t = t * w * BigRat::from_integer(c + &k_big - 1) / BigRat::from_integer(k_big);
        }
        out.push(t.clone());
    }
    out
}

/// `∏_j (1 - w_j s)^{-c_j}` to `terms` coefficients past the constant.
pub fn expand_product_form(factors: &[(BigRat, BigInt)], terms: usize) -> ZetaSeries {
    let len = terms + 1;
    let mut acc = Poly::one();
    for (w, c) in factors {
        acc = acc.mul_trunc(&Poly::new(binomial_series(w, c, len)), len);
    }
    let mut coefficients = acc.into_coeffs();
    coefficients.resize(len, BigRat::zero());
    ZetaSeries { coefficients }
}
