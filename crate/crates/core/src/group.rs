//! Groups and endomorphism pairs.
//!
//! An abelian group here is always an S-arithmetic localization
//! `Z[1/S]^d`; a nilpotent group is described by the abelian factors of its
//! isolated lower central series together with the induced maps. The tool
//! cannot check that factor data comes from an actual nilpotent group, only
//! the hypotheses that are checkable on the factors themselves.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::arith::{factorize, strip_primes, BigRat, IntMat, Prime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ZeroRank,
    NotPrime(u128),
    DuplicatePrime(Prime),
    DimensionMismatch { map: &'static str, rows: usize, cols: usize, rank: usize },
    DenominatorOutsideS { map: &'static str, row: usize, col: usize, prime: String },
    NoFactors,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroRank => write!(f, "rank must be at least 1"),
            Violation::NotPrime(n) => write!(f, "inverted prime {n} is not prime"),
            Violation::DuplicatePrime(p) => write!(f, "inverted prime {p} listed twice"),
            Violation::DimensionMismatch { map, rows, cols, rank } => write!(
                f,
                "dimension mismatch: {map} is {rows}x{cols} but the group has rank {rank}"
            ),
            Violation::DenominatorOutsideS { map, row, col, prime } => write!(
                f,
                "{map}[{}][{}]: denominator prime {prime} ∉ S",
                row + 1,
                col + 1
            ),
            Violation::NoFactors => write!(f, "nilpotent data needs at least one factor"),
        }
    }
}

/// `Z[1/S]^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SArithAbelianGroup {
    rank: usize,
    inverted: BTreeSet<Prime>,
}

impl SArithAbelianGroup {
    pub fn new(rank: usize, inverted_primes: &[u128]) -> Result<Self, Vec<Violation>> {
        let mut violations = Vec::new();
        if rank == 0 {
            violations.push(Violation::ZeroRank);
        }
        let mut inverted = BTreeSet::new();
        for &p in inverted_primes {
            match Prime::new(p) {
                Ok(p) => {
                    if !inverted.insert(p) {
                        violations.push(Violation::DuplicatePrime(p));
                    }
                }
                Err(_) => violations.push(Violation::NotPrime(p)),
            }
        }
        if violations.is_empty() {
            Ok(SArithAbelianGroup { rank, inverted })
        } else {
            Err(violations)
        }
    }

    /// `Z^d`
    pub fn integers(rank: usize) -> Self {
        SArithAbelianGroup::new(rank, &[]).expect("rank >= 1")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn inverted_primes(&self) -> &BTreeSet<Prime> {
        &self.inverted
    }

    pub fn inverts(&self, p: Prime) -> bool {
        self.inverted.contains(&p)
    }

    /// True if `q` lies in `Z[1/S]`.
    pub fn contains(&self, q: &BigRat) -> bool {
        strip_primes(q.denom(), &self.inverted).is_one()
    }
}

impl fmt::Display for SArithAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted.is_empty() {
            write!(f, "Z")?;
        } else {
            let s: Vec<String> = self.inverted.iter().map(Prime::to_string).collect();
            write!(f, "Z[1/{}]", s.join(","))?;
        }
        if self.rank > 1 {
            write!(f, "^{}", self.rank)?;
        }
        Ok(())
    }
}

/// Two endomorphisms, as matrices acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndoPair {
    pub phi: IntMat,
    pub psi: IntMat,
}

impl EndoPair {
    pub fn new(phi: IntMat, psi: IntMat) -> Self {
        EndoPair { phi, psi }
    }

    /// `(psi, phi)`
    pub fn swapped(&self) -> Self {
        EndoPair { phi: self.psi.clone(), psi: self.phi.clone() }
    }

    /// `(phi^n, psi^n)`
    pub fn pow(&self, n: u64) -> Result<Self, crate::arith::ArithError> {
        Ok(EndoPair { phi: self.phi.pow(n)?, psi: self.psi.pow(n)? })
    }
}

fn smallest_prime_label(cofactor: &BigInt) -> String {
    match factorize(&cofactor.abs().to_biguint().expect("nonnegative")) {
        Ok(f) if !f.is_empty() => f[0].0.to_string(),
        _ => cofactor.to_string(),
    }
}

/// Checks every invariant of the group and of the pair relative to it.
pub fn validate(group: &SArithAbelianGroup, pair: &EndoPair) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if group.rank == 0 {
        violations.push(Violation::ZeroRank);
    }
    for (name, m) in [("phi", &pair.phi), ("psi", &pair.psi)] {
        if m.rows() != group.rank || m.cols() != group.rank {
            violations.push(Violation::DimensionMismatch {
                map: name,
                rows: m.rows(),
                cols: m.cols(),
                rank: group.rank,
            });
            continue;
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let rest = strip_primes(m.get(i, j).denom(), &group.inverted);
                if !rest.is_one() {
                    violations.push(Violation::DenominatorOutsideS {
                        map: name,
                        row: i,
                        col: j,
                        prime: smallest_prime_label(&rest),
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// One factor `G_k` of the isolated lower central series with its induced
/// pair `(phi_k, psi_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotentFactor {
    group: SArithAbelianGroup,
    pair: EndoPair,
}

impl NilpotentFactor {
    pub fn new(group: SArithAbelianGroup, pair: EndoPair) -> Result<Self, Vec<Violation>> {
        validate(&group, &pair)?;
        Ok(NilpotentFactor { group, pair })
    }

    pub fn group(&self) -> &SArithAbelianGroup {
        &self.group
    }

    pub fn pair(&self) -> &EndoPair {
        &self.pair
    }

    pub fn rank(&self) -> usize {
        self.group.rank
    }
}

/// Factor data, ordered from `G/γ̄_2` down to the last nontrivial term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotentGroupData {
    factors: Vec<NilpotentFactor>,
}

impl NilpotentGroupData {
    pub fn new(factors: Vec<NilpotentFactor>) -> Result<Self, Vec<Violation>> {
        if factors.is_empty() {
            return Err(vec![Violation::NoFactors]);
        }
        Ok(NilpotentGroupData { factors })
    }

    pub fn factors(&self) -> &[NilpotentFactor] {
        &self.factors
    }

    /// Nilpotency class `c`.
    pub fn class(&self) -> usize {
        self.factors.len()
    }

    pub fn hirsch_length(&self) -> usize {
        self.factors.iter().map(NilpotentFactor::rank).sum()
    }
}

/// Either a single abelian group with a pair, or nilpotent factor data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndoSystem {
    Abelian(NilpotentFactor),
    Nilpotent(NilpotentGroupData),
}

impl EndoSystem {
    pub fn abelian(group: SArithAbelianGroup, pair: EndoPair) -> Result<Self, Vec<Violation>> {
        Ok(EndoSystem::Abelian(NilpotentFactor::new(group, pair)?))
    }

    pub fn factors(&self) -> &[NilpotentFactor] {
        match self {
            EndoSystem::Abelian(f) => std::slice::from_ref(f),
            EndoSystem::Nilpotent(data) => data.factors(),
        }
    }
}
