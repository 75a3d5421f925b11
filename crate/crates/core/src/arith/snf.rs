use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{guard_int, rat, ArithError, IntMat};

/// `u * m * v == d` with `u`, `v` unimodular and `d` diagonal, entries
/// non-negative, each dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl SmithForm {
    /// Diagonal entries `d_1 | d_2 | ...`, `min(rows, cols)` of them.
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).to_integer())
            .collect()
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, k: usize) {
        self.a.swap(i, k);
        self.u.swap(i, k);
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(j, k);
        }
    }

    /// row_i += f * row_k
    fn add_row(&mut self, i: usize, k: usize, f: &BigInt) -> Result<(), ArithError> {
        for m in [&mut self.a, &mut self.u] {
            let src = m[k].clone();
            for (x, s) in m[i].iter_mut().zip(&src) {
                *x += f * s;
                guard_int(x)?;
            }
        }
        Ok(())
    }

    /// col_j += f * col_k
    fn add_col(&mut self, j: usize, k: usize, f: &BigInt) -> Result<(), ArithError> {
        for m in [&mut self.a, &mut self.v] {
            for row in m.iter_mut() {
                let s = row[k].clone();
                row[j] += f * s;
                guard_int(&row[j])?;
            }
        }
        Ok(())
    }

    /// Smallest nonzero |a_ij| with i, j >= t; first hit in row-major order.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.len() {
            for j in t..self.a[i].len() {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

/// Smith normal form of an integral matrix.
pub fn smith_normal_form(m: &IntMat) -> Result<SmithForm, ArithError> {
    let a = m.to_integer_rows()?;
    let (r, c) = (m.rows(), m.cols());
    let eye = |n: usize| -> Vec<Vec<BigInt>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect()
    };
    let mut w = Work { a, u: eye(r), v: eye(c) };

    for t in 0..r.min(c) {
        let Some((pi, pj)) = w.min_pivot(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    w.add_row(i, t, &-q)?;
                    dirty |= !w.a[i][t].is_zero();
                }
            }
            for j in t + 1..c {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    w.add_col(j, t, &-q)?;
                    dirty |= !w.a[t][j].is_zero();
                }
            }
            if dirty {
                let (pi, pj) = w.min_pivot(t).expect("nonzero remainder exists");
                w.swap_rows(t, pi);
                w.swap_cols(t, pj);
                continue;
            }
            let pivot = w.a[t][t].clone();
            let offender = (t + 1..r).find(|&i| {
                (t + 1..c).any(|j| !w.a[i][j].is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => w.add_row(t, i, &BigInt::one())?,
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.add_row(t, t, &BigInt::from(-2))?;
        }
    }

    let to_mat = |rows: Vec<Vec<BigInt>>| {
        IntMat::from_rows(rows.into_iter().map(|r| r.into_iter().map(rat).collect()).collect())
            .expect("rectangular")
    };
    let d = IntMat::new(r, c, w.a.into_iter().flatten().map(rat).collect())?;
    Ok(SmithForm { u: to_mat(w.u), d, v: to_mat(w.v) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use proptest::prelude::*;

    fn check(m: &IntMat) -> SmithForm {
        let s = smith_normal_form(m).unwrap();
        assert_eq!(s.u.mul(m).unwrap().mul(&s.v).unwrap(), s.d);
        assert!(s.u.det().unwrap().abs() == rat(1) || s.u.rows() == 0);
        assert!(s.v.det().unwrap().abs() == rat(1) || s.v.rows() == 0);
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let inv = s.invariants();
        assert!(inv.iter().all(|x| !x.is_negative()));
        for w in inv.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn examples() {
        assert_eq!(check(&IntMat::identity(3)).d, IntMat::identity(3));
        let s = check(&IntMat::diagonal(vec![rat(2), rat(3)]));
        assert_eq!(s.invariants(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(check(&IntMat::zero(2, 2)).d, IntMat::zero(2, 2));
        let s = check(&IntMat::from_ints(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]));
        assert_eq!(
            s.invariants(),
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        let s = check(&IntMat::from_ints(&[[0, 6], [4, 0], [0, 0]]));
        assert_eq!(s.invariants(), vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn rejects_fractions() {
        let m = IntMat::from_rows(vec![vec![ratio(1, 2)]]).unwrap();
        assert_eq!(smith_normal_form(&m), Err(ArithError::NonIntegralMatrix));
    }

    /// Brute-force oracle for 2x2: d_1 = gcd of entries, d_1 d_2 = |det|.
    #[test]
    fn two_by_two_against_gcd_oracle() {
        for a in -4i64..=4 {
            for b in -3i64..=3 {
                for c in [-2i64, 0, 5] {
                    for d in [-3i64, 1, 4] {
                        let m = IntMat::from_ints(&[[a, b], [c, d]]);
                        let s = check(&m);
                        let g = a.gcd(&b).gcd(&c).gcd(&d);
                        let det = (a * d - b * c).abs();
                        let inv = s.invariants();
                        assert_eq!(inv[0], BigInt::from(g));
                        assert_eq!(&inv[0] * &inv[1], BigInt::from(det));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn snf_invariants(v in prop::collection::vec(-12i64..=12, 12), rows in 1usize..=4) {
            let cols = 12 / rows;
            let m = IntMat::new(rows, cols, v[..rows * cols].iter().map(|&x| rat(x)).collect()).unwrap();
            let s = check(&m);
            if rows == cols {
                let det = m.det().unwrap();
                if !det.is_zero() {
                    let prod: BigInt = s.invariants().iter().product();
                    prop_assert_eq!(rat(prod), det.abs());
                }
            }
        }
    }
}
