use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ArithError, BigRat};

/// Upper bound (exclusive) below which the Miller-Rabin witness set
/// {2, 3, ..., 41} is deterministic.
pub const PRIMALITY_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

const TRIAL_DIVISION_BOUND: u32 = 1000;
const FACTOR_TRIAL_BOUND: u32 = 10_000;
const WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// A rational prime, certified on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u128);

impl Prime {
    pub fn new(p: u128) -> Result<Self, ArithError> {
        if is_prime(p)? {
            Ok(Prime(p))
        } else {
            Err(ArithError::NotPrime(p.to_string()))
        }
    }

    pub fn get(self) -> u128 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Additive p-adic valuation; `Infinite` is reserved for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PadicVal {
    Finite(i64),
    Infinite,
}

impl PadicVal {
    pub fn finite(self) -> Option<i64> {
        match self {
            PadicVal::Finite(v) => Some(v),
            PadicVal::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PadicVal::Infinite)
    }
}

impl Add for PadicVal {
    type Output = PadicVal;

    fn add(self, rhs: PadicVal) -> PadicVal {
        match (self, rhs) {
            (PadicVal::Finite(a), PadicVal::Finite(b)) => PadicVal::Finite(a + b),
            _ => PadicVal::Infinite,
        }
    }
}

impl fmt::Display for PadicVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicVal::Finite(v) => write!(f, "{v}"),
            PadicVal::Infinite => write!(f, "inf"),
        }
    }
}

/// Deterministic primality test: trial division by small primes, then
/// Miller-Rabin with a witness set that is exact below [`PRIMALITY_LIMIT`].
pub fn is_prime(n: u128) -> Result<bool, ArithError> {
    if n < 2 {
        return Ok(false);
    }
    for d in 2..=TRIAL_DIVISION_BOUND as u128 {
        if d * d > n {
            return Ok(true);
        }
        if n % d == 0 {
            return Ok(n == d);
        }
    }
    let big = BigUint::from(n);
    if miller_rabin_composite(&big) {
        return Ok(false);
    }
    if n >= PRIMALITY_LIMIT {
        return Err(ArithError::Unsupported(format!(
            "primality of {n} cannot be certified (limit {PRIMALITY_LIMIT})"
        )));
    }
    Ok(true)
}

/// True if some witness proves `n` composite. `n` must be odd and > 41.
fn miller_rabin_composite(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &a in WITNESSES.iter() {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return true;
    }
    false
}

fn valuation_int(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(q)`, so that `|q|_p = p^(-v)`. Zero is rejected.
pub fn padic_valuation(q: &BigRat, p: Prime) -> Result<PadicVal, ArithError> {
    if q.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    Ok(padic_valuation_or_inf(q, p))
}

/// Like [`padic_valuation`] but maps zero to `+inf`.
pub fn padic_valuation_or_inf(q: &BigRat, p: Prime) -> PadicVal {
    if q.is_zero() {
        return PadicVal::Infinite;
    }
    let pb = p.to_bigint();
    PadicVal::Finite(valuation_int(q.numer(), &pb) - valuation_int(q.denom(), &pb))
}

/// `|q|_p` as an exact rational (a power of p, or 0).
pub fn abs_padic(q: &BigRat, p: Prime) -> BigRat {
    match padic_valuation_or_inf(q, p) {
        PadicVal::Infinite => BigRat::zero(),
        PadicVal::Finite(v) => {
            let pw = num_traits::pow(p.to_bigint(), v.unsigned_abs() as usize);
            if v >= 0 {
                BigRat::new(BigInt::one(), pw)
            } else {
                BigRat::from_integer(pw)
            }
        }
    }
}

pub fn abs_archimedean(q: &BigRat) -> BigRat {
    q.abs()
}

/// Removes every factor of every prime in `primes` from `n`.
pub fn strip_primes<'a>(n: &BigInt, primes: impl IntoIterator<Item = &'a Prime>) -> BigInt {
    let mut n = n.clone();
    if n.is_zero() {
        return n;
    }
    for p in primes {
        let pb = p.to_bigint();
        loop {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            n = q;
        }
    }
    n
}

/// Prime factorization of a positive integer, ascending by prime.
pub fn factorize(n: &BigUint) -> Result<Vec<(Prime, u32)>, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    let mut out: Vec<(Prime, u32)> = Vec::new();
    let mut m = n.clone();
    let mut d = 2u32;
    while d <= FACTOR_TRIAL_BOUND {
        let db = BigUint::from(d);
        if &db * &db > m {
            break;
        }
        let mut e = 0;
        while (&m % &db).is_zero() {
            m /= &db;
            e += 1;
        }
        if e > 0 {
            out.push((Prime(d as u128), e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        let mut large = Vec::new();
        split_large(m, &mut large)?;
        large.sort();
        for p in large {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
    }
    Ok(out)
}

/// `m` has no prime factor below the trial bound.
fn split_large(m: BigUint, out: &mut Vec<Prime>) -> Result<(), ArithError> {
    if m.is_one() {
        return Ok(());
    }
    let bound = BigUint::from(FACTOR_TRIAL_BOUND);
    if m <= &bound * &bound || !miller_rabin_composite(&m) {
        let v = m.to_u128().filter(|&v| v < PRIMALITY_LIMIT).ok_or_else(|| {
            ArithError::Unsupported(format!("cannot certify primality of factor {m}"))
        })?;
        out.push(Prime(v));
        return Ok(());
    }
    let d = pollard_brent(&m);
    let other = &m / &d;
    split_large(d, out)?;
    split_large(other, out)
}

fn pollard_brent(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let step = |x: &BigUint, c: &BigUint| (x * x + c) % n;
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    for c in 1u32.. {
        let c = BigUint::from(c);
        let batch = 64u64;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = one.clone();
        let mut g = one.clone();
        let mut r = 1u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = step(&y, &c);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..batch.min(r - k) {
                    y = step(&y, &c);
                    q = (&q * absdiff(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = step(&ys, &c);
                g = absdiff(&x, &ys).gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
    }
    unreachable!("pollard_brent exhausted parameters")
}
