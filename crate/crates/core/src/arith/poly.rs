use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rat, BigRat};

/// Dense univariate polynomial over Q, ascending coefficients, no trailing
/// zeros (the zero polynomial has no coefficients).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRat>,
}

impl Poly {
    pub fn new(coeffs: Vec<BigRat>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_ints<I: Into<BigInt>>(coeffs: impl IntoIterator<Item = I>) -> Self {
        Poly::new(coeffs.into_iter().map(rat).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRat::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Poly::new(vec![c])
    }

    /// `x - root`
    pub fn linear_root(root: &BigRat) -> Self {
        Poly::new(vec![-root.clone(), BigRat::one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRat> {
        self.coeffs
    }

    /// Coefficient of x^i (zero past the degree).
    pub fn coeff(&self, i: usize) -> BigRat {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRat {
        self.coeffs.last().cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &BigRat) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Product truncated to terms of degree `< len`.
    pub fn mul_trunc(&self, other: &Poly, len: usize) -> Poly {
        let mut out = vec![BigRat::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * b;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as u64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lead = self.leading();
        Poly::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree part, monic.
    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Lowest common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

impl fmt::Display for Poly {
    /// Ascending-order rendering in the variable `s`, e.g. `1 - 4s + 3s^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.coeffs, "s"))
    }
}

/// Renders ascending coefficients as `c0 + c1 v + c2 v^2 ...`.
pub(crate) fn render(coeffs: &[BigRat], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("({a})")
        };
        match i {
            0 => out.push_str(&mag),
            _ => {
                if !a.is_one() {
                    out.push_str(&mag);
                }
                out.push_str(var);
                if i > 1 {
                    out.push_str(&format!("^{i}"));
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Rational roots with multiplicities, ascending.
///
/// Clearing denominators and substituting `x = y / a` (with `a` the leading
/// coefficient) turns the polynomial into a monic integer one whose rational
/// roots are integers; those are isolated exactly with a Sturm sequence on
/// half-integer endpoints.
pub fn rational_roots(p: &Poly) -> Vec<(BigRat, usize)> {
    let mut roots = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return roots;
    }
    let mut work = p.clone();
    let mut zero_mult = 0;
    while work.coeff(0).is_zero() {
        work = work.div_rem(&Poly::from_ints([0, 1])).0;
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((BigRat::zero(), zero_mult));
    }
    if work.degree().unwrap_or(0) > 0 {
        let l = rat(work.denominator_lcm());
        let int_poly = work.scale(&l);
        let d = int_poly.degree().unwrap();
        let a = int_poly.leading();
        // g(y) = a^(d-1) p(y/a), monic with integer coefficients
        let mut g = Vec::with_capacity(d + 1);
        let mut apow = BigRat::one();
        for i in (0..d).rev() {
            g.push((i, int_poly.coeff(i) * &apow));
            apow *= &a;
        }
        let mut gc = vec![BigRat::zero(); d + 1];
        for (i, c) in g {
            gc[i] = c;
        }
        gc[d] = BigRat::one();
        let g = Poly::new(gc);
        let bound = g
            .coeffs
            .iter()
            .map(|c| c.abs().to_integer())
            .max()
            .unwrap_or_else(BigInt::zero)
            + BigInt::one();
        let h = g.squarefree();
        let sturm = sturm_sequence(&h);
        let mut int_roots = Vec::new();
        isolate_integer_roots(&h, &sturm, -bound.clone(), bound, &mut int_roots);
        for y in int_roots {
            let x = rat(y) / &a;
            let lin = Poly::linear_root(&x);
            let mut mult = 0;
            loop {
                let (q, r) = work.div_rem(&lin);
                if !r.is_zero() {
                    break;
                }
                work = q;
                mult += 1;
            }
            debug_assert!(mult > 0);
            roots.push((x, mult));
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    roots
}

fn sturm_sequence(h: &Poly) -> Vec<Poly> {
    let mut seq = vec![h.clone(), h.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(Poly::new(r.coeffs.into_iter().map(|c| -c).collect()));
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &BigRat) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

fn half_below(k: &BigInt) -> BigRat {
    BigRat::new(BigInt::from(2) * k - BigInt::one(), BigInt::from(2))
}

/// Pushes every integer root of `h` in `[lo, hi]`, ascending.
fn isolate_integer_roots(h: &Poly, sturm: &[Poly], lo: BigInt, hi: BigInt, out: &mut Vec<BigInt>) {
    let left = half_below(&lo);
    let right = half_below(&(&hi + BigInt::one()));
    let count = sign_changes(sturm, &left) - sign_changes(sturm, &right);
    if count == 0 {
        return;
    }
    if lo == hi {
        if h.eval(&rat(lo.clone())).is_zero() {
            out.push(lo);
        }
        return;
    }
    let mid = (&lo + &hi).div_floor(&BigInt::from(2));
    isolate_integer_roots(h, sturm, lo, mid.clone(), out);
    isolate_integer_roots(h, sturm, mid + BigInt::one(), hi, out);
}
