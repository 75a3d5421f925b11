//! Problem files: JSON with every rational written as a string.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use reidzeta::arith::{BigRat, IntMat, Prime};
use reidzeta::group::{
    validate, EndoPair, EndoSystem, NilpotentFactor, NilpotentGroupData, SArithAbelianGroup, Violation,
};
use reidzeta::spectra::{DeclaredVal, ExternalEigenData, ExternalPair};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer};

use crate::CliError;

pub const SCHEMA: &str = "reidzeta/1";

/// A rational read from `"p/q"`, `"p"` or a JSON integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rational(pub BigRat);

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a rational as a string like \"-3/4\", or an integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Rational, E> {
                parse_rational(s).map(Rational).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational(BigRat::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational(BigRat::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
                Err(E::custom(format!("floating-point value {v} rejected; write rationals as strings like \"3/4\"")))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRat, String> {
    let t = s.trim();
    let bad = || format!("{s:?} is not a rational of the form p or p/q");
    let valid = |part: &str| {
        let digits = part.strip_prefix('-').unwrap_or(part);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    match t.split_once('/') {
        Some((p, q)) if valid(p) && valid(q) && !q.starts_with('-') => {
            let q: BigRat = q.parse().map_err(|_| bad())?;
            if num_traits::Zero::is_zero(&q) {
                return Err(format!("{s:?} has zero denominator"));
            }
            Ok(p.parse::<BigRat>().map_err(|_| bad())? / q)
        }
        None if valid(t) => t.parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

/// A declared valuation: a rational or `"inf"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation(pub DeclaredVal);

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Valuation;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a rational valuation or \"inf\"")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Valuation, E> {
                if s.trim() == "inf" {
                    return Ok(Valuation(DeclaredVal::Infinite));
                }
                parse_rational(s).map(|q| Valuation(DeclaredVal::Finite(q))).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Valuation, E> {
                Ok(Valuation(DeclaredVal::Finite(BigRat::from_integer(v.into()))))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Valuation, E> {
                Ok(Valuation(DeclaredVal::Finite(BigRat::from_integer(v.into()))))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema: String,
    pub group: GroupSpec,
}

/// One group, either `"abelian"` (single factor fields) or `"nilpotent"`
/// (`factors`). Kept flat so parse errors point at the offending token.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub inverted_primes: Vec<u64>,
    #[serde(default)]
    pub phi: Option<Vec<Vec<Rational>>>,
    #[serde(default)]
    pub psi: Option<Vec<Vec<Rational>>>,
    #[serde(default)]
    pub external_eigendata: Option<ExternalSpec>,
    #[serde(default)]
    pub factors: Option<Vec<FactorSpec>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub rank: usize,
    #[serde(default)]
    pub inverted_primes: Vec<u64>,
    pub phi: Vec<Vec<Rational>>,
    pub psi: Vec<Vec<Rational>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalSpec {
    pub pairs: Vec<ExternalPairSpec>,
    #[serde(default)]
    pub witness_primes: Vec<u64>,
    pub triangularisable: bool,
    #[serde(default)]
    pub embedding_note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalPairSpec {
    #[serde(default = "one")]
    pub multiplicity: usize,
    pub xi_abs_sq: Rational,
    pub eta_abs_sq: Rational,
    #[serde(default)]
    pub conjugate_of: Option<usize>,
    #[serde(default)]
    pub valuations: BTreeMap<String, (Valuation, Valuation)>,
}

fn one() -> usize {
    1
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub system: EndoSystem,
    pub external: Option<ExternalEigenData>,
    pub description: String,
}

/// 1-based line of `"key"`, searched from the start of the given factor.
fn line_of(text: &str, key: &str, factor: usize) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let start = text.match_indices("\"rank\"").nth(factor).map_or(0, |(i, _)| i);
    let start = text[start..]
        .find(&needle)
        .map(|i| start + i)
        .or_else(|| text.match_indices(&needle).nth(factor).map(|(i, _)| i))?;
    Some(text[..start].matches('\n').count() + 1)
}

fn violation_message(text: &str, factor: Option<usize>, v: &Violation) -> String {
    let occurrence = factor.unwrap_or(0);
    let key = match v {
        Violation::DimensionMismatch { map, .. } | Violation::DenominatorOutsideS { map, .. } => *map,
        Violation::NotPrime(_) | Violation::DuplicatePrime(_) => "inverted_primes",
        Violation::ZeroRank => "rank",
        Violation::NoFactors => "factors",
    };
    let prefix = factor.map(|k| format!("factor {}: ", k + 1)).unwrap_or_default();
    match line_of(text, key, occurrence) {
        Some(line) => format!("line {line}: {prefix}{v}"),
        None => format!("{prefix}{v}"),
    }
}

fn matrix(rows: &[Vec<Rational>], name: &str) -> Result<IntMat, String> {
    let rows: Vec<Vec<BigRat>> = rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect();
    IntMat::from_rows(rows).map_err(|e| format!("{name}: {e}"))
}

fn build_factor(
    text: &str,
    index: Option<usize>,
    rank: usize,
    primes: &[u64],
    phi: &[Vec<Rational>],
    psi: &[Vec<Rational>],
) -> Result<NilpotentFactor, CliError> {
    let located = |vs: Vec<Violation>| {
        CliError::Validation(vs.iter().map(|v| violation_message(text, index, v)).collect::<Vec<_>>().join("\n"))
    };
    let primes: Vec<u128> = primes.iter().map(|&p| p as u128).collect();
    let group = SArithAbelianGroup::new(rank, &primes).map_err(located)?;
    let pair = EndoPair::new(
        matrix(phi, "phi").map_err(CliError::Validation)?,
        matrix(psi, "psi").map_err(CliError::Validation)?,
    );
    validate(&group, &pair).map_err(located)?;
    NilpotentFactor::new(group, pair).map_err(located)
}

fn prime(p: u64, context: &str) -> Result<Prime, CliError> {
    Prime::new(p as u128).map_err(|_| CliError::Validation(format!("{context}: {p} is not prime")))
}

fn build_external(spec: &ExternalSpec) -> Result<ExternalEigenData, CliError> {
    let mut pairs = Vec::with_capacity(spec.pairs.len());
    for (i, p) in spec.pairs.iter().enumerate() {
        let context = format!("external_eigendata.pairs[{}]", i + 1);
        let mut valuations = BTreeMap::new();
        for (key, (a, b)) in &p.valuations {
            let q: u64 = key
                .parse()
                .map_err(|_| CliError::Validation(format!("{context}: valuation key {key:?} is not a prime")))?;
            valuations.insert(prime(q, &context)?, (a.0.clone(), b.0.clone()));
        }
        pairs.push(ExternalPair {
            multiplicity: p.multiplicity,
            xi_abs_sq: p.xi_abs_sq.0.clone(),
            eta_abs_sq: p.eta_abs_sq.0.clone(),
            conjugate_of: p.conjugate_of,
            valuations,
        });
    }
    let witness_primes = spec
        .witness_primes
        .iter()
        .map(|&q| prime(q, "external_eigendata.witness_primes"))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(ExternalEigenData {
        pairs,
        witness_primes,
        triangularisable: spec.triangularisable,
        embedding_note: spec.embedding_note.clone(),
    })
}

pub fn parse_problem(text: &str) -> Result<Problem, CliError> {
    let spec: ProblemSpec =
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("parse error: {e}")))?;
    if spec.schema != SCHEMA {
        return Err(CliError::Validation(format!(
            "line {}: unsupported schema {:?}, expected {SCHEMA:?}",
            line_of(text, "schema", 0).unwrap_or(1),
            spec.schema
        )));
    }
    let g = spec.group;
    let at = |key: &str, msg: String| match line_of(text, key, 0) {
        Some(line) => CliError::Validation(format!("line {line}: {msg}")),
        None => CliError::Validation(msg),
    };
    match g.kind.as_str() {
        "abelian" => {
            if g.factors.is_some() {
                return Err(at("factors", "an abelian group takes rank, phi and psi, not factors".into()));
            }
            let (Some(rank), Some(phi), Some(psi)) = (g.rank, &g.phi, &g.psi) else {
                return Err(at("type", "an abelian group needs rank, phi and psi".into()));
            };
            let factor = build_factor(text, None, rank, &g.inverted_primes, phi, psi)?;
            let description = factor.group().to_string();
            let external = match &g.external_eigendata {
                Some(e) => {
                    let ext = build_external(e)?;
                    ext.validate(factor.pair())
                        .map_err(|e| at("external_eigendata", e.to_string()))?;
                    Some(ext)
                }
                None => None,
            };
            Ok(Problem { system: EndoSystem::Abelian(factor), external, description })
        }
        "nilpotent" => {
            let Some(specs) = &g.factors else {
                return Err(at("type", "a nilpotent group needs factors".into()));
            };
            if g.rank.is_some() || g.phi.is_some() || g.psi.is_some() || g.external_eigendata.is_some() {
                return Err(at("type", "a nilpotent group lists its maps under factors".into()));
            }
            let mut factors = Vec::with_capacity(specs.len());
            for (k, f) in specs.iter().enumerate() {
                factors.push(build_factor(text, Some(k), f.rank, &f.inverted_primes, &f.phi, &f.psi)?);
            }
            let description = format!(
                "nilpotent, factors {}",
                factors.iter().map(|f| f.group().to_string()).collect::<Vec<_>>().join(", ")
            );
            let data = NilpotentGroupData::new(factors).map_err(|vs| {
                CliError::Validation(vs.iter().map(|v| violation_message(text, None, v)).collect::<Vec<_>>().join("\n"))
            })?;
            Ok(Problem { system: EndoSystem::Nilpotent(data), external: None, description })
        }
        other => Err(at("type", format!("unknown group type {other:?}, expected \"abelian\" or \"nilpotent\""))),
    }
}
