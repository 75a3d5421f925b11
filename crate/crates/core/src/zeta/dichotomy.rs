use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Pow, Signed, Zero};
use rayon::prelude::*;

use super::recurrence::{fit_rational_series, RationalForm};
use super::series::{counts_to_rats, expand_product_form, zeta_coefficients, ZetaSeries};
use super::ZetaError;
use crate::arith::{padic_valuation_or_inf, BigRat, PadicVal, Poly, Prime};
use crate::engine::{r_sequence, tameness_check, EngineError, TameMode, Tameness};
use crate::group::{EndoSystem, NilpotentFactor, SArithAbelianGroup};
use crate::spectra::{commuting_check, joint_eigenvalues, DeclaredVal, EigenPair, ExternalEigenData, SpectraError};

/// A prime `p` and a 1-based pair index `i ∉ I(p)` with `|xi_i|_p = |eta_i|_p`,
/// in the given 1-based factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Witness {
    pub factor: usize,
    pub prime: Prime,
    pub index: usize,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p = {}, i = {} (factor {})", self.prime, self.index, self.factor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotApplicableReason {
    NonCommuting { factor: usize },
    IrrationalSpectrum { factor: usize, map: &'static str },
    NotTame { factor: usize, n: u64 },
    EqualModuli { factor: usize, index: usize },
    NoRecurrence { terms: usize, max_order: usize },
    InvalidEigenData(String),
}

impl fmt::Display for NotApplicableReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotApplicableReason::NonCommuting { factor } => write!(
                f,
                "non-commuting pair (factor {factor}): not simultaneously triangularisable by the implemented criterion"
            ),
            NotApplicableReason::IrrationalSpectrum { factor, map } => write!(
                f,
                "spectrum of {map} (factor {factor}) is not rational; supply external eigendata"
            ),
            NotApplicableReason::NotTame { factor, n } => {
                write!(f, "not tame (factor {factor}): R(phi^{n}, psi^{n}) is infinite")
            }
            NotApplicableReason::EqualModuli { factor, index } => write!(
                f,
                "|xi_{index}| = |eta_{index}| at the archimedean place (factor {factor})"
            ),
            NotApplicableReason::NoRecurrence { terms, max_order } => write!(
                f,
                "no rational form of denominator degree <= {max_order} fits {terms} terms"
            ),
            NotApplicableReason::InvalidEigenData(msg) => write!(f, "invalid eigendata: {msg}"),
        }
    }
}

/// `Z(s) = ∏_j (1 - w_j s)^{-c_j}`, sorted by decreasing `|w_j|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductForm {
    pub factors: Vec<(BigRat, BigInt)>,
}

impl ProductForm {
    fn from_terms(terms: BTreeMap<BigRat, BigInt>) -> Self {
        let mut factors: Vec<(BigRat, BigInt)> =
            terms.into_iter().filter(|(w, c)| !w.is_zero() && !c.is_zero()).collect();
        factors.sort_by(|a, b| match b.0.abs().cmp(&a.0.abs()) {
            Ordering::Equal => b.0.cmp(&a.0),
            o => o,
        });
        ProductForm { factors }
    }

    pub fn expand(&self, terms: usize) -> ZetaSeries {
        expand_product_form(&self.factors, terms)
    }

    /// `Σ_j c_j w_j^n`
    pub fn power_sum(&self, n: u64) -> BigRat {
        self.factors
            .iter()
            .map(|(w, c)| BigRat::from_integer(c.clone()) * Pow::pow(w, n as i32))
            .sum()
    }

    pub fn to_rational_form(&self) -> RationalForm {
        let mut num = Poly::one();
        let mut den = Poly::one();
        for (w, c) in &self.factors {
            let lin = Poly::new(vec![BigRat::one(), -w.clone()]);
            let e = c.magnitude().try_into().expect("exponent fits in u32");
            if c.is_positive() {
                den = den.mul(&lin.pow(e));
            } else {
                num = num.mul(&lin.pow(e));
            }
        }
        RationalForm::new(&num, &den)
    }
}

impl fmt::Display for ProductForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(w, c)| {
                let lin = Poly::new(vec![BigRat::one(), -w.clone()]);
                let e = -c;
                if e.is_one() {
                    format!("({lin})")
                } else {
                    format!("({lin})^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct FactorGf {
    pairs: Vec<EigenPair>,
    /// `b · η`
    scale: BigRat,
    /// `(p, i)` with `i ∈ S(p) \ S*(p)`, `i` 1-based.
    boundary: Vec<(Prime, usize)>,
}

/// `R(phi^n, psi^n) = g(n) f(n)` for rational joint spectra, one entry per
/// factor; both functions multiply over factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfDecomposition {
    factors: Vec<FactorGf>,
}

fn pow_rat(p: Prime, e: i64) -> BigRat {
    let pw = BigRat::from_integer(num_traits::pow(p.to_bigint(), e.unsigned_abs() as usize));
    if e >= 0 {
        pw
    } else {
        pw.recip()
    }
}

impl GfDecomposition {
    /// Every pair must satisfy `xi != ±eta`; otherwise some `R_n` is infinite.
    pub fn new(inputs: &[(SArithAbelianGroup, Vec<EigenPair>)]) -> Result<Self, ZetaError> {
        let mut factors = Vec::with_capacity(inputs.len());
        for (k, (group, pairs)) in inputs.iter().enumerate() {
            for pair in pairs {
                let n = if pair.xi == pair.eta {
                    1
                } else if pair.xi == -pair.eta.clone() {
                    2
                } else {
                    continue;
                };
                return Err(ZetaError::NotApplicable(NotApplicableReason::NotTame { factor: k + 1, n }));
            }
            // P = S, and S(p) is every index for p in S
            let mut scale = BigRat::one();
            let mut boundary = Vec::new();
            for &p in group.inverted_primes() {
                for (i, pair) in pairs.iter().enumerate() {
                    let m = pair.multiplicity as i64;
                    let vx = padic_valuation_or_inf(&pair.xi, p);
                    let ve = padic_valuation_or_inf(&pair.eta, p);
                    if vx == ve {
                        let v = ve.finite().expect("eta is nonzero when valuations agree");
                        scale *= pow_rat(p, -v * m);
                        boundary.push((p, i + 1));
                    } else {
                        let low = match (vx, ve) {
                            (PadicVal::Finite(a), PadicVal::Finite(b)) => a.min(b),
                            (PadicVal::Finite(a), PadicVal::Infinite) | (PadicVal::Infinite, PadicVal::Finite(a)) => a,
                            (PadicVal::Infinite, PadicVal::Infinite) => unreachable!("tame"),
                        };
                        scale *= pow_rat(p, -low * m);
                    }
                }
            }
            factors.push(FactorGf { pairs: pairs.clone(), scale, boundary });
        }
        Ok(GfDecomposition { factors })
    }

    /// `b^n η^n ∏_i |xi_i^n - eta_i^n|_∞`
    pub fn g(&self, n: u64) -> BigRat {
        let e = n as i32;
        let mut acc = BigRat::one();
        for f in &self.factors {
            acc *= Pow::pow(&f.scale, e);
            for pair in &f.pairs {
                acc *= Pow::pow(pair.difference(n).abs(), pair.multiplicity as i32);
            }
        }
        acc
    }

    /// `∏_p ∏_{i ∈ S(p) \ S*(p)} |(xi_i / eta_i)^n - 1|_p`
    pub fn f(&self, n: u64) -> BigRat {
        let e = n as i32;
        let mut acc = BigRat::one();
        for f in &self.factors {
            for &(p, i) in &f.boundary {
                let pair = &f.pairs[i - 1];
                let x = Pow::pow(&pair.xi / &pair.eta, e) - BigRat::one();
                let v = padic_valuation_or_inf(&x, p).finite().expect("tame");
                acc *= pow_rat(p, -v * pair.multiplicity as i64);
            }
        }
        acc
    }

    pub fn witnesses(&self) -> Vec<Witness> {
        let mut out: Vec<Witness> = self
            .factors
            .iter()
            .enumerate()
            .flat_map(|(k, f)| f.boundary.iter().map(move |&(prime, index)| Witness { factor: k + 1, prime, index }))
            .collect();
        out.sort();
        out
    }

    /// `g(n) = Σ_j c_j w_j^n` with `|xi^n - eta^n| = δ_1^n - δ_2^n`,
    /// `δ_1 = max(|xi|, |eta|)`, `δ_2 = xi eta / δ_1`.
    pub fn product_form(&self) -> ProductForm {
        let mut terms: BTreeMap<BigRat, BigInt> = BTreeMap::from([(BigRat::one(), BigInt::one())]);
        for f in &self.factors {
            terms = terms.into_iter().map(|(w, c)| (w * &f.scale, c)).collect();
            for pair in &f.pairs {
                let d1 = pair.xi.abs().max(pair.eta.abs());
                let d2 = &pair.xi * &pair.eta / &d1;
                let m = pair.multiplicity;
                let mut next = BTreeMap::new();
                for (w, c) in &terms {
                    for k in 0..=m {
                        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                        let coeff = c * binomial(BigInt::from(m), BigInt::from(k)) * sign;
                        let wk = w * Pow::pow(&d1, (m - k) as i32) * Pow::pow(&d2, k as i32);
                        *next.entry(wk).or_insert_with(BigInt::zero) += coeff;
                    }
                }
                terms = next;
            }
        }
        ProductForm::from_terms(terms)
    }

    /// `b · η · ∏_i max(|xi_i|, |eta_i|)`, multiplied over factors.
    pub fn dominant_modulus(&self) -> BigRat {
        let mut acc = BigRat::one();
        for f in &self.factors {
            acc *= &f.scale;
            for pair in &f.pairs {
                acc *= Pow::pow(pair.xi.abs().max(pair.eta.abs()), pair.multiplicity as i32);
            }
        }
        acc
    }
}

/// `(g(n), f(n))` for each `n` in `range`.
pub fn gf_decomposition(
    inputs: &[(SArithAbelianGroup, Vec<EigenPair>)],
    range: RangeInclusive<u64>,
) -> Result<Vec<(BigRat, BigRat)>, ZetaError> {
    let gf = GfDecomposition::new(inputs)?;
    Ok(range.collect::<Vec<_>>().into_par_iter().map(|n| (gf.g(n), gf.f(n))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Terms used when the closed form must be fitted from data.
    pub terms: usize,
    pub max_order: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { terms: 40, max_order: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DichotomyVerdict {
    Rational {
        product_form: Option<ProductForm>,
        rational_form: RationalForm,
        /// Rests on user-supplied eigendata.
        conditional: bool,
    },
    NaturalBoundary {
        witness: Witness,
        witnesses: Vec<Witness>,
        conditional: bool,
    },
    NotApplicable {
        reason: NotApplicableReason,
    },
}

impl DichotomyVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            DichotomyVerdict::Rational { .. } => "Rational",
            DichotomyVerdict::NaturalBoundary { .. } => "NaturalBoundary",
            DichotomyVerdict::NotApplicable { .. } => "NotApplicable",
        }
    }

    pub fn is_conditional(&self) -> bool {
        match self {
            DichotomyVerdict::Rational { conditional, .. } | DichotomyVerdict::NaturalBoundary { conditional, .. } => {
                *conditional
            }
            DichotomyVerdict::NotApplicable { .. } => false,
        }
    }
}

fn not_applicable(reason: NotApplicableReason) -> DichotomyVerdict {
    DichotomyVerdict::NotApplicable { reason }
}

/// Rational spectra: steps (a) commuting, (b) tame, (c) distinct archimedean
/// moduli, (d) the valuation scan over `p ∈ S`.
fn classify_rational_tier(factors: &[NilpotentFactor]) -> Result<DichotomyVerdict, ZetaError> {
    let mut inputs = Vec::with_capacity(factors.len());
    for (k, factor) in factors.iter().enumerate() {
        let factor_no = k + 1;
        if !commuting_check(factor.pair()) {
            return Ok(not_applicable(NotApplicableReason::NonCommuting { factor: factor_no }));
        }
        let pairs = match joint_eigenvalues(factor.pair()) {
            Ok(p) => p,
            Err(SpectraError::IrrationalSpectrum { map }) => {
                return Ok(not_applicable(NotApplicableReason::IrrationalSpectrum { factor: factor_no, map }))
            }
            Err(SpectraError::Arith(e)) => return Err(e.into()),
            Err(e) => return Err(EngineError::Spectra(e).into()),
        };
        match tameness_check(factor.group(), factor.pair(), TameMode::Exact)? {
            Tameness::NotTame { n } => {
                return Ok(not_applicable(NotApplicableReason::NotTame { factor: factor_no, n }))
            }
            Tameness::Tame | Tameness::Unknown { .. } => {}
        }
        // for rationals |xi| = |eta| forces xi = ±eta, already excluded
        if let Some(i) = pairs.iter().position(|p| p.xi.abs() == p.eta.abs()) {
            return Ok(not_applicable(NotApplicableReason::EqualModuli { factor: factor_no, index: i + 1 }));
        }
        inputs.push((factor.group().clone(), pairs));
    }
    let gf = match GfDecomposition::new(&inputs) {
        Ok(gf) => gf,
        Err(ZetaError::NotApplicable(reason)) => return Ok(not_applicable(reason)),
        Err(e) => return Err(e),
    };
    let witnesses = gf.witnesses();
    if let Some(&witness) = witnesses.first() {
        return Ok(DichotomyVerdict::NaturalBoundary { witness, witnesses, conditional: false });
    }
    let product_form = gf.product_form();
    let rational_form = product_form.to_rational_form();
    Ok(DichotomyVerdict::Rational { product_form: Some(product_form), rational_form, conditional: false })
}

fn classify_external(
    factor: &NilpotentFactor,
    ext: &ExternalEigenData,
    opts: &ClassifyOptions,
) -> Result<DichotomyVerdict, ZetaError> {
    let invalid = |msg: String| Ok(not_applicable(NotApplicableReason::InvalidEigenData(msg)));
    match ext.validate(factor.pair()) {
        Ok(()) => {}
        Err(SpectraError::InvalidEigenData(msg)) => return invalid(msg),
        Err(SpectraError::Arith(e)) => return Err(e.into()),
        Err(e) => return invalid(e.to_string()),
    }
    if !ext.triangularisable {
        return invalid("eigendata does not assert simultaneous triangularisability".into());
    }
    let group = factor.group();
    if let Some(p) = group.inverted_primes().iter().find(|p| !ext.witness_primes.contains(p)) {
        return invalid(format!("declared prime set omits inverted prime {p}"));
    }
    if let Tameness::NotTame { n } =
        tameness_check(group, factor.pair(), TameMode::Horizon(opts.terms as u64))?
    {
        return Ok(not_applicable(NotApplicableReason::NotTame { factor: 1, n }));
    }
    if let Some(i) = ext.pairs.iter().position(|p| p.xi_abs_sq == p.eta_abs_sq) {
        return Ok(not_applicable(NotApplicableReason::EqualModuli { factor: 1, index: i + 1 }));
    }
    let mut witnesses = Vec::new();
    for &p in group.inverted_primes() {
        for (i, pair) in ext.pairs.iter().enumerate() {
            if let (DeclaredVal::Finite(a), DeclaredVal::Finite(b)) = &pair.valuations[&p] {
                if a == b {
                    witnesses.push(Witness { factor: 1, prime: p, index: i + 1 });
                }
            }
        }
    }
    witnesses.sort();
    if let Some(&witness) = witnesses.first() {
        return Ok(DichotomyVerdict::NaturalBoundary { witness, witnesses, conditional: true });
    }
    let system = EndoSystem::Abelian(factor.clone());
    let r = match r_sequence(&system, opts.terms as u64) {
        Ok(r) => r,
        Err(EngineError::NotTameAt { n }) => {
            return Ok(not_applicable(NotApplicableReason::NotTame { factor: 1, n }))
        }
        Err(e) => return Err(e.into()),
    };
    let a = zeta_coefficients(&counts_to_rats(&r));
    match fit_rational_series(a.coefficients(), opts.max_order) {
        Some(rational_form) => Ok(DichotomyVerdict::Rational { product_form: None, rational_form, conditional: true }),
        None => Ok(not_applicable(NotApplicableReason::NoRecurrence {
            terms: opts.terms,
            max_order: opts.max_order,
        })),
    }
}

/// Decides whether `Z(s)` is rational or has a natural boundary at its radius
/// of convergence, or reports which hypothesis fails. External eigendata is
/// only accepted for an abelian system.
pub fn classify_dichotomy(
    system: &EndoSystem,
    external: Option<&ExternalEigenData>,
    opts: &ClassifyOptions,
) -> Result<DichotomyVerdict, ZetaError> {
    match (system, external) {
        (_, None) => classify_rational_tier(system.factors()),
        (EndoSystem::Abelian(factor), Some(ext)) => classify_external(factor, ext, opts),
        (EndoSystem::Nilpotent(_), Some(_)) => Ok(not_applicable(NotApplicableReason::InvalidEigenData(
            "external eigendata is only supported for abelian inputs".into(),
        ))),
    }
}
