use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{guard_int, guard_rat, rat, ArithError, BigRat, Poly};

/// Dense matrix with exact rational entries, row-major.
///
/// The name reflects the main use (integer and `Z[1/S]` matrices); entries
/// are rational, and operations that need integrality check it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    entries: Vec<BigRat>,
}

#[allow(clippy::should_implement_trait)]
impl IntMat {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRat>) -> Result<Self, ArithError> {
        if entries.len() != rows * cols {
            return Err(ArithError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMat { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<BigRat>>) -> Result<Self, ArithError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ArithError::DimensionMismatch("ragged rows".into()));
        }
        IntMat::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor for integer literals; panics on ragged input.
    pub fn from_ints<I: Into<BigInt> + Copy, R: AsRef<[I]>>(rows: &[R]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| rat(x)).collect())
            .collect();
        IntMat::from_rows(rows).expect("rectangular integer literal")
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, entries: vec![BigRat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        IntMat::scalar(n, BigRat::one())
    }

    pub fn scalar(n: usize, c: BigRat) -> Self {
        IntMat::diagonal(vec![c; n])
    }

    pub fn diagonal(diag: Vec<BigRat>) -> Self {
        let n = diag.len();
        let mut m = IntMat::zero(n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRat {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRat) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[BigRat] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigRat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(BigRat::is_integer)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn require_square(&self) -> Result<usize, ArithError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(ArithError::NonSquare { rows: self.rows, cols: self.cols })
        }
    }

    fn same_shape(&self, other: &IntMat) -> Result<(), ArithError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(ArithError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &IntMat) -> Result<IntMat, ArithError> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(IntMat { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &IntMat) -> Result<IntMat, ArithError> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(IntMat { rows: self.rows, cols: self.cols, entries })
    }

    pub fn neg(&self) -> IntMat {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &BigRat) -> IntMat {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &IntMat) -> Result<IntMat, ArithError> {
        if self.cols != other.rows {
            return Err(ArithError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let limit = super::bit_limit();
        let bits = self.max_entry_bits() + other.max_entry_bits();
        if bits > limit + 1 {
            return Err(ArithError::SizeLimitExceeded { bits: bits - 1, limit });
        }
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        for e in &out.entries {
            guard_rat(e)?;
        }
        Ok(out)
    }

    fn max_entry_bits(&self) -> u64 {
        self.entries
            .iter()
            .map(|e| e.numer().bits().max(e.denom().bits()))
            .max()
            .unwrap_or(0)
    }

    pub fn transpose(&self) -> IntMat {
        let mut out = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Result<BigRat, ArithError> {
        let n = self.require_square()?;
        Ok((0..n).map(|i| self.get(i, i).clone()).sum())
    }

    /// `self^n` by binary exponentiation, `n >= 1`.
    pub fn pow(&self, n: u64) -> Result<IntMat, ArithError> {
        self.require_square()?;
        if n == 0 {
            return Err(ArithError::InvalidExponent);
        }
        let mut base = self.clone();
        let mut acc: Option<IntMat> = None;
        let mut e = n;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(acc.expect("n >= 1"))
    }

    /// Least common multiple of entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }

    /// Integer entries, row-major; fails on any non-integral entry.
    pub fn to_integer_rows(&self) -> Result<Vec<Vec<BigInt>>, ArithError> {
        if !self.is_integral() {
            return Err(ArithError::NonIntegralMatrix);
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.to_integer()).collect())
            .collect())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination after
    /// clearing denominators.
    pub fn det(&self) -> Result<BigRat, ArithError> {
        let n = self.require_square()?;
        if n == 0 {
            return Ok(BigRat::one());
        }
        let l = self.denominator_lcm();
        let mut a = self.scale(&rat(l.clone())).to_integer_rows()?;
        let d = bareiss(&mut a)?;
        Ok(BigRat::new(d, num_traits::pow(l, n)))
    }

    /// Coefficients of `det(X I - self)`, ascending, by Faddeev-LeVerrier.
    pub fn char_poly(&self) -> Result<Poly, ArithError> {
        let n = self.require_square()?;
        let mut c = vec![BigRat::zero(); n + 1];
        c[n] = BigRat::one();
        let mut m = IntMat::zero(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m)?;
            for i in 0..n {
                next.entries[i * n + i] += &c[n - k + 1];
            }
            let am = self.mul(&next)?;
            let coeff = -am.trace()? / rat(k as u64);
            guard_rat(&coeff)?;
            c[n - k] = coeff;
            m = next;
        }
        Ok(Poly::new(c))
    }

    /// Evaluates a polynomial at this matrix (Horner).
    pub fn eval_poly(&self, p: &Poly) -> Result<IntMat, ArithError> {
        let n = self.require_square()?;
        let mut acc = IntMat::zero(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self)?;
            for i in 0..n {
                acc.entries[i * n + i] += c;
            }
        }
        Ok(acc)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (IntMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, col).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, col).is_zero() {
                    let f = m.get(i, col).clone();
                    for j in 0..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, as the columns of the returned matrix.
    pub fn kernel(&self) -> IntMat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = IntMat::zero(self.cols, free.len());
        for (b, &f) in free.iter().enumerate() {
            k.set(f, b, BigRat::one());
            for (row, &p) in pivots.iter().enumerate() {
                k.set(p, b, -r.get(row, f).clone());
            }
        }
        k
    }

    pub fn inverse(&self) -> Result<IntMat, ArithError> {
        let n = self.require_square()?;
        let mut aug = IntMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, BigRat::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(ArithError::Singular);
        }
        let mut inv = IntMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Submatrix from the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMat {
        let mut out = IntMat::zero(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn bareiss(a: &mut [Vec<BigInt>]) -> Result<BigInt, ArithError> {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                guard_int(&v)?;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

pub fn det(m: &IntMat) -> Result<BigRat, ArithError> {
    m.det()
}

pub fn char_poly(m: &IntMat) -> Result<Poly, ArithError> {
    m.char_poly()
}

pub fn mat_pow(m: &IntMat, n: u64) -> Result<IntMat, ArithError> {
    m.pow(n)
}
