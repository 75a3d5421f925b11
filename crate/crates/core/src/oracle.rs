//! Brute-force twisted class counts for cross-checking the engine.
//!
//! Nothing here uses determinants, Smith forms or spectra from the rest of
//! the crate: classes are enumerated explicitly with a union-find.

use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::arith::IntMat;

/// Largest number of cells the abelian oracle will allocate by default.
pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

/// Tables up to this size are validated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 512;

const SAMPLES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("(Z/{modulus})^{rank} has more than {budget} cells")]
    BudgetExceeded { modulus: u64, rank: usize, budget: u64 },
    #[error("psi - phi is singular")]
    SingularDifference,
    #[error("oracle needs small integral square matrices of equal size")]
    BadMatrix,
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("induced map is not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("modulus {0} outside 2..=11")]
    ModulusOutOfRange(u32),
}

/// Disjoint sets over `0..n` with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    classes: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize);
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n], classes: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        self.classes -= 1;
    }

    pub fn classes(&self) -> usize {
        self.classes
    }
}

fn small_entries(m: &IntMat) -> Option<Vec<Vec<i128>>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let x = m.get(i, j);
                    if x.is_integer() {
                        x.to_integer().to_i128()
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect()
}

/// Laplace expansion along the first row.
fn cofactor_det(a: &[Vec<i128>]) -> Option<i128> {
    let n = a.len();
    if n == 0 {
        return Some(1);
    }
    if n == 1 {
        return Some(a[0][0]);
    }
    let mut acc: i128 = 0;
    for j in 0..n {
        if a[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> =
            a[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
        let term = a[0][j].checked_mul(cofactor_det(&minor)?)?;
        acc = if j % 2 == 0 { acc.checked_add(term)? } else { acc.checked_sub(term)? };
    }
    Some(acc)
}

/// Number of classes of `x ~ x + (psi - phi) e_j` on `(Z/N)^d`,
/// `N = |det(psi - phi)|`. Since `N` annihilates the cokernel of `psi - phi`,
/// this equals the cokernel order.
pub fn brute_force_abelian_r(phi: &IntMat, psi: &IntMat, budget: u64) -> Result<u64, OracleError> {
    let d = phi.rows();
    if phi.cols() != d || psi.rows() != d || psi.cols() != d {
        return Err(OracleError::BadMatrix);
    }
    let (a, b) = small_entries(phi).zip(small_entries(psi)).ok_or(OracleError::BadMatrix)?;
    let delta: Vec<Vec<i128>> =
        (0..d).map(|i| (0..d).map(|j| b[i][j] - a[i][j]).collect()).collect();
    let det = cofactor_det(&delta).ok_or(OracleError::BadMatrix)?;
    if det == 0 {
        return Err(OracleError::SingularDifference);
    }
    let n = det.unsigned_abs();
    let over = || OracleError::BudgetExceeded { modulus: n.min(u64::MAX as u128) as u64, rank: d, budget };
    let cells = (0..d).try_fold(1u128, |acc, _| acc.checked_mul(n)).ok_or_else(over)?;
    if cells > budget as u128 {
        return Err(over());
    }
    let (n, cells) = (n as u64, cells as usize);
    // columns of delta reduced mod n
    let moves: Vec<Vec<u64>> =
        (0..d).map(|j| (0..d).map(|i| delta[i][j].rem_euclid(n as i128) as u64).collect()).collect();
    let mut uf = UnionFind::new(cells);
    let mut digits = vec![0u64; d];
    for x in 0..cells {
        let mut rest = x as u64;
        for digit in digits.iter_mut() {
            *digit = rest % n;
            rest /= n;
        }
        for mv in &moves {
            let mut y = 0u64;
            for i in (0..d).rev() {
                y = y * n + (digits[i] + mv[i]) % n;
            }
            uf.union(x, y as usize);
        }
    }
    Ok(uf.classes() as u64)
}

/// A finite group by multiplication table, with two endomorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<u32>,
    phi: Vec<u32>,
    psi: Vec<u32>,
}

impl FiniteGroupTable {
    /// `table[x][y]` is the index of `xy`; `phi[x]`, `psi[x]` are images.
    pub fn new(table: Vec<Vec<usize>>, phi: Vec<usize>, psi: Vec<usize>) -> Result<Self, OracleError> {
        let m = table.len();
        let bad = |s: String| Err(OracleError::InvalidTable(s));
        if m == 0 {
            return bad("empty table".into());
        }
        if table.iter().any(|r| r.len() != m || r.iter().any(|&x| x >= m)) {
            return bad("table is not an m x m array of indices below m".into());
        }
        if phi.len() != m || psi.len() != m || phi.iter().chain(&psi).any(|&x| x >= m) {
            return bad("endomorphism arrays must map 0..m into 0..m".into());
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        let mul = |x: usize, y: usize| flat[x * m + y] as usize;
        let Some(identity) = (0..m).find(|&e| (0..m).all(|x| mul(e, x) == x && mul(x, e) == x)) else {
            return bad("no identity".into());
        };
        let mut inverse = vec![0u32; m];
        for x in 0..m {
            match (0..m).find(|&y| mul(x, y) == identity) {
                Some(y) if mul(y, x) == identity => inverse[x] = y as u32,
                _ => return bad(format!("element {x} has no inverse")),
            }
        }
        let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = if m <= EXHAUSTIVE_LIMIT {
            Box::new((0..m).flat_map(move |x| (0..m).flat_map(move |y| (0..m).map(move |z| (x, y, z)))))
        } else {
            let mut rng = StdRng::seed_from_u64(0x7ab1e);
            Box::new((0..SAMPLES).map(move |_| (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m))))
        };
        for (x, y, z) in triples {
            if mul(mul(x, y), z) != mul(x, mul(y, z)) {
                return bad(format!("({x} {y}) {z} != {x} ({y} {z})"));
            }
        }
        let pairs: Box<dyn Iterator<Item = (usize, usize)>> = if m <= EXHAUSTIVE_LIMIT {
            Box::new((0..m).flat_map(move |x| (0..m).map(move |y| (x, y))))
        } else {
            let mut rng = StdRng::seed_from_u64(0x40e0);
            Box::new((0..SAMPLES).map(move |_| (rng.gen_range(0..m), rng.gen_range(0..m))))
        };
        for (x, y) in pairs {
            for (name, f) in [("phi", &phi), ("psi", &psi)] {
                if f[mul(x, y)] != mul(f[x], f[y]) {
                    return Err(OracleError::NotAHomomorphism(format!(
                        "{name}({x} * {y}) != {name}({x}) * {name}({y})"
                    )));
                }
            }
        }
        Ok(FiniteGroupTable {
            order: m,
            table: flat,
            identity,
            inverse,
            phi: phi.into_iter().map(|x| x as u32).collect(),
            psi: psi.into_iter().map(|x| x as u32).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y] as usize
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x] as usize
    }

    pub fn phi(&self, x: usize) -> usize {
        self.phi[x] as usize
    }

    pub fn psi(&self, x: usize) -> usize {
        self.psi[x] as usize
    }

    /// Same group with different endomorphisms.
    pub fn with_maps(&self, phi: Vec<usize>, psi: Vec<usize>) -> Result<Self, OracleError> {
        let rows = (0..self.order).map(|x| (0..self.order).map(|y| self.mul(x, y)).collect()).collect();
        FiniteGroupTable::new(rows, phi, psi)
    }

    /// Greedy generating set: the smallest index outside the subgroup
    /// generated so far, repeatedly.
    pub fn generators(&self) -> Vec<usize> {
        let m = self.order;
        let mut gens = Vec::new();
        let mut inside = vec![false; m];
        inside[self.identity] = true;
        let mut members = vec![self.identity];
        while let Some(g) = (0..m).find(|&x| !inside[x]) {
            gens.push(g);
            // closure under right multiplication by all generators
            let mut frontier = members.clone();
            while let Some(x) = frontier.pop() {
                for &h in &gens {
                    let y = self.mul(x, h);
                    if !inside[y] {
                        inside[y] = true;
                        members.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        gens
    }
}

/// Classes of `x ~ (g phi)^{-1} x (g psi)`, merging along `generators`.
pub fn count_classes_with(table: &FiniteGroupTable, generators: &[usize]) -> u64 {
    let mut uf = UnionFind::new(table.order());
    for &g in generators {
        let left = table.inv(table.phi(g));
        let right = table.psi(g);
        for x in 0..table.order() {
            uf.union(x, table.mul(table.mul(left, x), right));
        }
    }
    uf.classes() as u64
}

pub fn brute_force_finite_group_r(table: &FiniteGroupTable) -> u64 {
    count_classes_with(table, &table.generators())
}

fn heisenberg_index(q: u64, a: u64, b: u64, c: u64) -> usize {
    ((a * q + b) * q + c) as usize
}

/// `H(Z/q)`: upper unitriangular 3x3 matrices over `Z/q`, element `(a, b, c)`
/// for `[[1, a, c], [0, 1, b], [0, 0, 1]]` at index `(a q + b) q + c`.
/// The maps act by `(a, b, c) -> (M (a, b), det(M) c)`; this is a
/// homomorphism exactly when it passes validation.
pub fn heisenberg_quotient(q: u32, phi: &IntMat, psi: &IntMat) -> Result<FiniteGroupTable, OracleError> {
    if !(2..=11).contains(&q) {
        return Err(OracleError::ModulusOutOfRange(q));
    }
    let q = q as u64;
    let reduce = |m: &IntMat| -> Result<[u64; 5], OracleError> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(OracleError::BadMatrix);
        }
        let e = small_entries(m).ok_or(OracleError::BadMatrix)?;
        let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
        let r = |x: i128| x.rem_euclid(q as i128) as u64;
        Ok([r(e[0][0]), r(e[0][1]), r(e[1][0]), r(e[1][1]), r(det)])
    };
    let (mp, mq) = (reduce(phi)?, reduce(psi)?);
    let n = (q * q * q) as usize;
    let mut table = vec![vec![0usize; n]; n];
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let x = heisenberg_index(q, a, b, c);
                for a2 in 0..q {
                    for b2 in 0..q {
                        for c2 in 0..q {
                            let y = heisenberg_index(q, a2, b2, c2);
                            table[x][y] = heisenberg_index(q, (a + a2) % q, (b + b2) % q, (c + c2 + a * b2) % q);
                        }
                    }
                }
            }
        }
    }
    let image = |m: &[u64; 5]| -> Vec<usize> {
        let mut out = vec![0usize; n];
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    out[heisenberg_index(q, a, b, c)] =
                        heisenberg_index(q, (m[0] * a + m[1] * b) % q, (m[2] * a + m[3] * b) % q, (m[4] * c) % q);
                }
            }
        }
        out
    };
    FiniteGroupTable::new(table, image(&mp), image(&mq))
}

/// `|coker(A)|` for `A` acting on `(Z/q)^2`, from `d_1 = gcd(entries)` and
/// `d_1 d_2 = det`.
fn cokernel_mod_q(a: [i128; 4], q: i128) -> u64 {
    let d1 = a.iter().fold(0i128, |g, x| g.gcd(x));
    let det = a[0] * a[3] - a[1] * a[2];
    let d2 = if d1 == 0 { 0 } else { det / d1 };
    (d1.gcd(&q) * d2.gcd(&q)) as u64
}

/// Count predicted from the induced maps on `H/Z = (Z/q)^2` and on the
/// centre `Z = Z/q`, when one of the two differences is bijective.
pub fn heisenberg_prediction(q: u32, phi: &IntMat, psi: &IntMat) -> Option<u64> {
    let e = small_entries(phi)?;
    let f = small_entries(psi)?;
    let q = q as i128;
    let top = cokernel_mod_q([f[0][0] - e[0][0], f[0][1] - e[0][1], f[1][0] - e[1][0], f[1][1] - e[1][1]], q);
    let det = |m: &[Vec<i128>]| m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let centre = (det(&f) - det(&e)).gcd(&q).unsigned_abs() as u64;
    (top == 1 || centre == 1).then_some(top * centre)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn cyclic(m: usize) -> Vec<Vec<usize>> {
        (0..m).map(|x| (0..m).map(|y| (x + y) % m).collect()).collect()
    }

    fn conjugacy_classes(t: &FiniteGroupTable) -> u64 {
        let mut seen = vec![false; t.order()];
        let mut count = 0;
        for x in 0..t.order() {
            if seen[x] {
                continue;
            }
            count += 1;
            for g in 0..t.order() {
                seen[t.mul(t.mul(t.inv(g), x), g)] = true;
            }
        }
        count
    }

    fn s3() -> Vec<Vec<usize>> {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |p: [usize; 3]| perms.iter().position(|&x| x == p).unwrap();
        perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect()
    }

    #[test]
    fn abelian_examples() {
        let m = |v: i64| IntMat::from_ints(&[[v]]);
        assert_eq!(brute_force_abelian_r(&m(3), &m(1), DEFAULT_CELL_BUDGET), Ok(2));
        let shear = IntMat::from_ints(&[[1, 1], [0, 1]]);
        let lower = IntMat::from_ints(&[[1, 0], [1, 1]]);
        let (a, b) = (shear.pow(2).unwrap(), lower.pow(2).unwrap());
        assert_eq!(brute_force_abelian_r(&a, &b, DEFAULT_CELL_BUDGET), Ok(4));
        let id = IntMat::identity(2);
        let two = IntMat::scalar(2, crate::arith::rat(2));
        assert_eq!(brute_force_abelian_r(&id, &two, DEFAULT_CELL_BUDGET), Ok(1));
        assert_eq!(brute_force_abelian_r(&id, &id, DEFAULT_CELL_BUDGET), Err(OracleError::SingularDifference));
        assert!(matches!(
            brute_force_abelian_r(&m(0), &m(20_000_000), DEFAULT_CELL_BUDGET),
            Err(OracleError::BudgetExceeded { .. })
        ));
        // diag(2, 6): Z/2 x Z/6 has 12 elements
        let d = IntMat::from_ints(&[[3, 0], [0, 7]]);
        assert_eq!(brute_force_abelian_r(&id, &d, DEFAULT_CELL_BUDGET), Ok(12));
    }

    #[test]
    fn cofactor_determinant() {
        assert_eq!(cofactor_det(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]), Some(18));
        assert_eq!(cofactor_det(&[vec![0, 1], vec![1, 0]]), Some(-1));
    }

    #[test]
    fn finite_examples() {
        let t = FiniteGroupTable::new(vec![vec![0]], vec![0], vec![0]).unwrap();
        assert_eq!(brute_force_finite_group_r(&t), 1);
        let id: Vec<usize> = (0..6).collect();
        let c6 = FiniteGroupTable::new(cyclic(6), id.clone(), id.clone()).unwrap();
        assert_eq!(brute_force_finite_group_r(&c6), 6);
        let s3 = FiniteGroupTable::new(s3(), id.clone(), id).unwrap();
        assert_eq!(brute_force_finite_group_r(&s3), 3);
        assert_eq!(conjugacy_classes(&s3), 3);
    }

    #[test]
    fn invalid_tables() {
        let mut t = cyclic(4);
        t[1][1] = 3;
        let id: Vec<usize> = (0..4).collect();
        assert!(matches!(FiniteGroupTable::new(t, id.clone(), id.clone()), Err(OracleError::InvalidTable(_))));
        // x -> x + 1 on C4 does not fix the identity
        let shift: Vec<usize> = (0..4).map(|x| (x + 1) % 4).collect();
        assert!(matches!(FiniteGroupTable::new(cyclic(4), shift, id), Err(OracleError::NotAHomomorphism(_))));
    }

    #[test]
    fn heisenberg_tables() {
        let id = IntMat::identity(2);
        let h2 = heisenberg_quotient(2, &id, &id).unwrap();
        assert_eq!(h2.order(), 8);
        // non-abelian: (1,0,0)(0,1,0) != (0,1,0)(1,0,0)
        let (x, y) = (heisenberg_index(2, 1, 0, 0), heisenberg_index(2, 0, 1, 0));
        assert_ne!(h2.mul(x, y), h2.mul(y, x));
        assert_eq!(brute_force_finite_group_r(&h2), conjugacy_classes(&h2));

        let two = IntMat::from_ints(&[[2, 0], [0, 2]]);
        let h3 = heisenberg_quotient(3, &two, &id).unwrap();
        // centre scaled by det = 4 = 1 mod 3
        assert_eq!(h3.phi(heisenberg_index(3, 0, 0, 1)), heisenberg_index(3, 0, 0, 1));
        let shear = IntMat::from_ints(&[[1, 1], [0, 1]]);
        assert!(matches!(heisenberg_quotient(3, &shear, &id), Err(OracleError::NotAHomomorphism(_))));
        assert_eq!(heisenberg_quotient(12, &id, &id), Err(OracleError::ModulusOutOfRange(12)));
    }

    #[test]
    fn heisenberg_mod_ten() {
        let phi = IntMat::from_ints(&[[2, 0], [0, 3]]);
        let id = IntMat::identity(2);
        let h = heisenberg_quotient(10, &phi, &id).unwrap();
        assert_eq!(h.order(), 1000);
        assert_eq!(brute_force_finite_group_r(&h), 10);
        assert_eq!(heisenberg_prediction(10, &phi, &id), None);
        // mod 5 both differences diag(-1, -1) and 2 - 6 are bijective
        let psi = IntMat::from_ints(&[[1, 0], [0, 2]]);
        let h = heisenberg_quotient(5, &phi, &psi).unwrap();
        assert_eq!(heisenberg_prediction(5, &phi, &psi), Some(brute_force_finite_group_r(&h)));
    }

    #[test]
    fn generator_order_does_not_matter() {
        let phi = IntMat::from_ints(&[[2, 0], [0, 3]]);
        let psi = IntMat::from_ints(&[[4, 0], [0, 1]]);
        let h = heisenberg_quotient(5, &phi, &psi).unwrap();
        let expected = brute_force_finite_group_r(&h);
        let mut rng = StdRng::seed_from_u64(3);
        let mut all: Vec<usize> = (0..h.order()).collect();
        for _ in 0..5 {
            all.shuffle(&mut rng);
            assert_eq!(count_classes_with(&h, &all), expected);
            let mut gens = h.generators();
            gens.shuffle(&mut rng);
            assert_eq!(count_classes_with(&h, &gens), expected);
        }
    }

    #[test]
    fn identity_maps_count_conjugacy_classes() {
        for q in [2, 3, 5] {
            let id = IntMat::identity(2);
            let h = heisenberg_quotient(q, &id, &id).unwrap();
            // q^2 + q - 1 classes
            let q = q as u64;
            assert_eq!(brute_force_finite_group_r(&h), q * q + q - 1);
            assert_eq!(conjugacy_classes(&h), q * q + q - 1);
        }
    }
}
