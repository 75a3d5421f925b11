use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::ZetaError;
use crate::arith::{BigRat, Poly};

/// `p(s)/q(s)` with integer coefficients, `gcd(p, q) = 1`, `q(0) > 0` and
/// the coefficients of `p` and `q` jointly coprime. When the expansion has
/// integer coefficients this forces `q(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalForm {
    numerator: Vec<BigInt>,
    denominator: Vec<BigInt>,
}

impl RationalForm {
    /// Panics if `q` is zero.
    pub fn new(p: &Poly, q: &Poly) -> Self {
        assert!(!q.is_zero(), "zero denominator");
        let g = p.gcd(q);
        let (mut p, mut q) = if g.degree().unwrap_or(0) > 0 {
            (p.div_rem(&g).0, q.div_rem(&g).0)
        } else {
            (p.clone(), q.clone())
        };
        let low = q.coeffs().iter().find(|c| !c.is_zero()).expect("nonzero").clone();
        p = p.scale(&low.recip());
        q = q.scale(&low.recip());
        let lcm = p.denominator_lcm().lcm(&q.denominator_lcm());
        let to_ints = |x: &Poly| -> Vec<BigInt> {
            x.coeffs().iter().map(|c| (c * BigRat::from_integer(lcm.clone())).to_integer()).collect()
        };
        let (mut num, mut den) = (to_ints(&p), to_ints(&q));
        let content = num.iter().chain(&den).fold(BigInt::zero(), |g, c| g.gcd(c));
        if !content.is_one() {
            for c in num.iter_mut().chain(den.iter_mut()) {
                *c /= &content;
            }
        }
        RationalForm { numerator: num, denominator: den }
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[BigInt] {
        &self.denominator
    }

    pub fn numerator_poly(&self) -> Poly {
        Poly::from_ints(self.numerator.iter().cloned())
    }

    pub fn denominator_poly(&self) -> Poly {
        Poly::from_ints(self.denominator.iter().cloned())
    }

    /// First `len` Taylor coefficients at `s = 0`. Panics if `q(0) = 0`.
    pub fn expand(&self, len: usize) -> Vec<BigRat> {
        let p = self.numerator_poly();
        let q = self.denominator_poly();
        let q0 = q.coeff(0);
        assert!(!q0.is_zero(), "pole at the origin");
        let mut out: Vec<BigRat> = Vec::with_capacity(len);
        for k in 0..len {
            let mut v = p.coeff(k);
            for i in 1..=k.min(q.degree().unwrap_or(0)) {
                v -= q.coeff(i) * &out[k - i];
            }
            out.push(v / &q0);
        }
        out
    }
}

fn wrap(coeffs: &[BigInt]) -> String {
    let p = Poly::from_ints(coeffs.iter().cloned());
    let s = p.to_string();
    if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.len() == 1 && self.denominator[0].is_one() {
            return write!(f, "{}", Poly::from_ints(self.numerator.iter().cloned()));
        }
        write!(f, "{}/{}", wrap(&self.numerator), wrap(&self.denominator))
    }
}

/// Shortest linear recurrence for `y`, as the connection polynomial
/// `C(s) = 1 + c_1 s + ... + c_L s^L` and its length `L`.
pub fn berlekamp_massey(y: &[BigRat]) -> (Poly, usize) {
    let mut c = Poly::one();
    let mut b = Poly::one();
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = BigRat::one();
    for n in 0..y.len() {
        let mut d = y[n].clone();
        for i in 1..=l {
            d += c.coeff(i) * &y[n - i];
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let mut shifted = vec![BigRat::zero(); shift];
        shifted.extend(b.coeffs().iter().map(|x| x * (&d / &last)));
        let next = c.sub(&Poly::new(shifted));
        if 2 * l <= n {
            b = c;
            l = n + 1 - l;
            last = d;
            shift = 1;
        } else {
            shift += 1;
        }
        c = next;
    }
    (c, l)
}

/// A linear recurrence `y_k = Σ_{i=1}^L coefficients[i-1] y_{k-i}` fitted to
/// `R_1, ..., R_N`, with `Z*` in closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRecurrence {
    pub order: usize,
    pub coefficients: Vec<BigRat>,
    pub zstar: RationalForm,
}

/// Numerator and connection polynomial of Σ y_k s^k, verified on every term.
fn fit(y: &[BigRat], max_order: usize) -> Option<(Poly, Poly, usize)> {
    let (c, l) = berlekamp_massey(y);
    if l > max_order {
        return None;
    }
    let prefix = Poly::new(y.to_vec()).mul_trunc(&c, l);
    for k in l..y.len() {
        let mut v = BigRat::zero();
        for i in 0..=l.min(k) {
            v += c.coeff(i) * &y[k - i];
        }
        if !v.is_zero() {
            return None;
        }
    }
    Some((prefix, c, l))
}

pub fn detect_linear_recurrence(r: &[BigRat], max_order: usize) -> Result<LinearRecurrence, ZetaError> {
    let needed = 2 * max_order + 4;
    if r.len() < needed {
        return Err(ZetaError::InsufficientTerms { needed, got: r.len() });
    }
    let no = || ZetaError::NoRecurrenceFound { max_order, terms: r.len() };
    let (p, c, l) = fit(r, max_order).ok_or_else(no)?;
    let zstar = RationalForm::new(&p.mul(&Poly::from_ints([0, 1])), &c);
    let mut expanded = zstar.expand(r.len() + 1);
    expanded.remove(0);
    if expanded != r {
        return Err(no());
    }
    Ok(LinearRecurrence {
        order: l,
        coefficients: (1..=l).map(|i| -c.coeff(i)).collect(),
        zstar,
    })
}

/// Rational closed form of a power series `a_0 + a_1 s + ...` known to
/// `a.len()` terms, if one of denominator degree at most `max_order` fits.
pub fn fit_rational_series(a: &[BigRat], max_order: usize) -> Option<RationalForm> {
    if a.len() < 2 * max_order + 4 {
        return None;
    }
    let (p, c, _) = fit(a, max_order)?;
    let form = RationalForm::new(&p, &c);
    (form.expand(a.len()) == a).then_some(form)
}
