//! Joint spectra of commuting pairs and the local data derived from them.
//!
//! Pair indices (`i` in `I(p)`, in valuation tables and in witnesses) are
//! 1-based positions in the list of [`EigenPair`]s.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{
    factorize, padic_valuation_or_inf, rational_roots, ArithError, BigRat, IntMat, PadicVal, Prime,
};
use crate::group::{EndoPair, SArithAbelianGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("phi and psi do not commute")]
    NotCommuting,
    #[error("the spectrum of {map} is not rational; supply external eigendata")]
    IrrationalSpectrum { map: &'static str },
    #[error("invalid eigendata: {0}")]
    InvalidEigenData(String),
}

/// Eigenvalues `xi` of phi and `eta` of psi on a common invariant line,
/// repeated `multiplicity` times.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EigenPair {
    pub xi: BigRat,
    pub eta: BigRat,
    pub multiplicity: usize,
}

impl EigenPair {
    pub fn new(xi: BigRat, eta: BigRat, multiplicity: usize) -> Self {
        EigenPair { xi, eta, multiplicity }
    }

    /// `xi^n - eta^n`
    pub fn difference(&self, n: u64) -> BigRat {
        let n = n as i32;
        num_traits::Pow::pow(&self.xi, n) - num_traits::Pow::pow(&self.eta, n)
    }
}

pub fn commuting_check(pair: &EndoPair) -> bool {
    match (pair.phi.mul(&pair.psi), pair.psi.mul(&pair.phi)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Aligned eigenvalue pairs of a commuting pair with rational spectra.
///
/// psi preserves each generalized eigenspace `V_xi` of phi; the eigenvalues
/// of psi restricted to `V_xi` are paired with `xi`. Sorted by `(xi, eta)`.
pub fn joint_eigenvalues(pair: &EndoPair) -> Result<Vec<EigenPair>, SpectraError> {
    if !commuting_check(pair) {
        return Err(SpectraError::NotCommuting);
    }
    let d = pair.phi.rows();
    let phi_roots = rational_roots(&pair.phi.char_poly()?);
    if phi_roots.iter().map(|r| r.1).sum::<usize>() != d {
        return Err(SpectraError::IrrationalSpectrum { map: "phi" });
    }
    let mut out = Vec::new();
    for (xi, mult) in phi_roots {
        let shifted = pair.phi.sub(&IntMat::scalar(d, xi.clone()))?;
        let space = shifted.pow(mult as u64)?.kernel();
        debug_assert_eq!(space.cols(), mult);
        let restricted = restrict(&pair.psi, &space)?;
        let eta_roots = rational_roots(&restricted.char_poly()?);
        if eta_roots.iter().map(|r| r.1).sum::<usize>() != mult {
            return Err(SpectraError::IrrationalSpectrum { map: "psi" });
        }
        for (eta, m) in eta_roots {
            out.push(EigenPair::new(xi.clone(), eta, m));
        }
    }
    out.sort();
    Ok(out)
}

/// Matrix of `map` on the invariant subspace spanned by the columns of
/// `basis`.
fn restrict(map: &IntMat, basis: &IntMat) -> Result<IntMat, ArithError> {
    let image = map.mul(basis)?;
    let (_, rows) = basis.transpose().rref();
    let cols: Vec<usize> = (0..basis.cols()).collect();
    let square = basis.select(&rows, &cols);
    let restricted = square.inverse()?.mul(&image.select(&rows, &cols))?;
    debug_assert_eq!(basis.mul(&restricted)?, image);
    Ok(restricted)
}

/// `I(p)` for `Z[1/S]^d`: every index when `p ∉ S`, none when `p ∈ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    count: usize,
    inverted: BTreeSet<Prime>,
}

impl IndexSets {
    pub fn get(&self, p: Prime) -> BTreeSet<usize> {
        if self.inverted.contains(&p) {
            BTreeSet::new()
        } else {
            (1..=self.count).collect()
        }
    }

    pub fn contains(&self, p: Prime, i: usize) -> bool {
        !self.inverted.contains(&p) && (1..=self.count).contains(&i)
    }

    /// `{1..n} \ I(p)`
    pub fn complement(&self, p: Prime) -> BTreeSet<usize> {
        let inside = self.get(p);
        (1..=self.count).filter(|i| !inside.contains(i)).collect()
    }

    pub fn to_map<'a>(&self, primes: impl IntoIterator<Item = &'a Prime>) -> BTreeMap<Prime, BTreeSet<usize>> {
        primes.into_iter().map(|&p| (p, self.get(p))).collect()
    }
}

/// The pro-p completion of `Z[1/S]^d` is `Z_p^d` for `p ∉ S` and trivial for
/// `p ∈ S`.
pub fn index_sets(group: &SArithAbelianGroup, pairs: &[EigenPair]) -> IndexSets {
    IndexSets { count: pairs.len(), inverted: group.inverted_primes().clone() }
}

/// `S` together with every prime dividing a numerator or denominator of some
/// nonzero eigenvalue.
pub fn relevant_primes(group: &SArithAbelianGroup, pairs: &[EigenPair]) -> Result<BTreeSet<Prime>, ArithError> {
    let mut out = group.inverted_primes().clone();
    for q in pairs.iter().flat_map(|p| [&p.xi, &p.eta]) {
        if q.is_zero() {
            continue;
        }
        for part in [q.numer(), q.denom()] {
            let magnitude = part.abs().to_biguint().expect("nonnegative");
            out.extend(factorize(&magnitude)?.into_iter().map(|(p, _)| p));
        }
    }
    Ok(out)
}

pub type ValuationTable = BTreeMap<(Prime, usize), (PadicVal, PadicVal)>;

/// `(v_p(xi_i), v_p(eta_i))` for each prime and 1-based index; zero maps to
/// `+inf`.
pub fn valuation_profile<'a>(pairs: &[EigenPair], primes: impl IntoIterator<Item = &'a Prime>) -> ValuationTable {
    let mut out = BTreeMap::new();
    for &p in primes {
        for (i, pair) in pairs.iter().enumerate() {
            out.insert(
                (p, i + 1),
                (padic_valuation_or_inf(&pair.xi, p), padic_valuation_or_inf(&pair.eta, p)),
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenPairProfile {
    pub pairs: Vec<EigenPair>,
    pub index_sets: BTreeMap<Prime, BTreeSet<usize>>,
    pub valuations: ValuationTable,
}

impl EigenPairProfile {
    pub fn build(group: &SArithAbelianGroup, pairs: Vec<EigenPair>) -> Result<Self, ArithError> {
        let primes = relevant_primes(group, &pairs)?;
        let index_sets = index_sets(group, &pairs).to_map(&primes);
        let valuations = valuation_profile(&pairs, &primes);
        Ok(EigenPairProfile { pairs, index_sets, valuations })
    }
}

/// `∏_i (xi_i^n - eta_i^n)^{m_i}`, the determinant of `phi^n - psi^n`.
pub fn aligned_product(pairs: &[EigenPair], n: u64) -> BigRat {
    pairs
        .iter()
        .map(|p| num_traits::Pow::pow(p.difference(n), p.multiplicity as i32))
        .product()
}

/// `∏_p ∏_{i ∈ I(p)} |xi_i^n - eta_i^n|_p^{-1}`, computed prime by prime from
/// the factorizations of the individual differences. `None` when some
/// difference vanishes.
pub fn finite_place_product(
    group: &SArithAbelianGroup,
    pairs: &[EigenPair],
    n: u64,
) -> Result<Option<BigRat>, ArithError> {
    let sets = index_sets(group, pairs);
    let mut acc = BigRat::one();
    for (i, pair) in pairs.iter().enumerate() {
        let a = pair.difference(n);
        if a.is_zero() {
            return Ok(None);
        }
        for (part, sign) in [(a.numer(), 1i64), (a.denom(), -1)] {
            let magnitude = part.abs().to_biguint().expect("nonnegative");
            for (p, e) in factorize(&magnitude)? {
                if !sets.contains(p, i + 1) {
                    continue;
                }
                let pw = num_traits::pow(p.to_bigint(), e as usize * pair.multiplicity);
                // |a|_p^{-1} = p^{v_p(a)}
                if sign > 0 {
                    acc *= BigRat::from_integer(pw);
                } else {
                    acc /= BigRat::from_integer(pw);
                }
            }
        }
    }
    Ok(Some(acc))
}

/// A p-adic valuation of an algebraic number: rational, or `+inf` for zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DeclaredVal {
    Finite(BigRat),
    Infinite,
}

/// One user-declared joint eigenvalue pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalPair {
    pub multiplicity: usize,
    /// `|xi|_∞^2` under the chosen complex embedding.
    pub xi_abs_sq: BigRat,
    pub eta_abs_sq: BigRat,
    /// 1-based index of the complex-conjugate partner, if any.
    pub conjugate_of: Option<usize>,
    /// `(v_p(xi), v_p(eta))` under the chosen p-adic embeddings.
    pub valuations: BTreeMap<Prime, (DeclaredVal, DeclaredVal)>,
}

/// Eigenvalue data for spectra that are not rational. The tool takes the
/// declared embeddings, the witness prime set and the triangularisability
/// assertion on trust; it checks only internal consistency and the
/// determinants of the supplied matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalEigenData {
    pub pairs: Vec<ExternalPair>,
    pub witness_primes: BTreeSet<Prime>,
    pub triangularisable: bool,
    /// Free-form description of the embeddings, carried into reports.
    pub embedding_note: Option<String>,
}

impl ExternalEigenData {
    pub fn validate(&self, pair: &EndoPair) -> Result<(), SpectraError> {
        let bad = |msg: String| Err(SpectraError::InvalidEigenData(msg));
        let d = pair.phi.rows();
        let total: usize = self.pairs.iter().map(|p| p.multiplicity).sum();
        if total != d {
            return bad(format!("multiplicities sum to {total}, rank is {d}"));
        }
        for (i, p) in self.pairs.iter().enumerate() {
            let idx = i + 1;
            if p.multiplicity == 0 {
                return bad(format!("pair {idx} has multiplicity 0"));
            }
            if p.xi_abs_sq.is_negative() || p.eta_abs_sq.is_negative() {
                return bad(format!("pair {idx} has a negative squared modulus"));
            }
            for prime in &self.witness_primes {
                if !p.valuations.contains_key(prime) {
                    return bad(format!("pair {idx} has no valuations at witness prime {prime}"));
                }
            }
            if let Some(j) = p.conjugate_of {
                let Some(q) = j.checked_sub(1).and_then(|k| self.pairs.get(k)) else {
                    return bad(format!("pair {idx} names conjugate {j}, which does not exist"));
                };
                if j == idx || q.conjugate_of != Some(idx) {
                    return bad(format!("conjugate pairing {idx} <-> {j} is not symmetric"));
                }
                if q.xi_abs_sq != p.xi_abs_sq || q.eta_abs_sq != p.eta_abs_sq || q.multiplicity != p.multiplicity {
                    return bad(format!("conjugate pairs {idx} and {j} disagree"));
                }
            }
        }
        // |det|^2 is the product of the squared moduli
        for (name, m, pick) in [
            ("phi", &pair.phi, (|p: &ExternalPair| p.xi_abs_sq.clone()) as fn(&ExternalPair) -> BigRat),
            ("psi", &pair.psi, |p: &ExternalPair| p.eta_abs_sq.clone()),
        ] {
            let det = m.det()?;
            let declared: BigRat = self
                .pairs
                .iter()
                .map(|p| num_traits::Pow::pow(pick(p), p.multiplicity as i32))
                .product();
            if declared != &det * &det {
                return bad(format!("declared moduli give |det {name}|^2 = {declared}, actual {}", &det * &det));
            }
        }
        // valuations add up to v_p(det)
        for prime in &self.witness_primes {
            for (name, m, side) in [("phi", &pair.phi, 0usize), ("psi", &pair.psi, 1)] {
                let det = m.det()?;
                let actual = padic_valuation_or_inf(&det, *prime);
                let mut sum = Some(BigRat::zero());
                for p in &self.pairs {
                    let (a, b) = &p.valuations[prime];
                    match (if side == 0 { a } else { b }, sum.as_mut()) {
                        (DeclaredVal::Finite(v), Some(s)) => *s += v * BigRat::from_integer(BigInt::from(p.multiplicity)),
                        _ => sum = None,
                    }
                }
                let consistent = match (sum, actual) {
                    (None, PadicVal::Infinite) => true,
                    (Some(s), PadicVal::Finite(v)) => s == BigRat::from_integer(BigInt::from(v)),
                    _ => false,
                };
                if !consistent {
                    return bad(format!("declared {prime}-adic valuations do not add up to v_{prime}(det {name})"));
                }
            }
        }
        Ok(())
    }
}
