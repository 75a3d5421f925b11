//! Report documents. Every number is a decimal string so nothing is lost to
//! floating point; rerendering a parsed report reproduces it byte for byte.

use std::fmt::Write as _;

use reidzeta::zeta::{DichotomyVerdict, LinearRecurrence, RationalForm, Witness};
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "reidzeta-report/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub spec_sha256: String,
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_sequence: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zstar: Option<ZstarReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<OracleRow>>,
    pub conditional: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub timing_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZstarReport {
    pub order: usize,
    /// `c_i` in `R_k = Σ c_i R_{k-i}`.
    pub recurrence: Vec<String>,
    pub rational_form: String,
    pub numerator: Vec<String>,
    pub denominator: Vec<String>,
}

impl ZstarReport {
    pub fn new(rec: &LinearRecurrence) -> Self {
        let (numerator, denominator) = coefficients(&rec.zstar);
        ZstarReport {
            order: rec.order,
            recurrence: rec.coefficients.iter().map(ToString::to_string).collect(),
            rational_form: rec.zstar.to_string(),
            numerator,
            denominator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub w: String,
    pub c: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub factor: usize,
    pub prime: u128,
    pub index: usize,
}

impl From<&Witness> for WitnessReport {
    fn from(w: &Witness) -> Self {
        WitnessReport { factor: w.factor, prime: w.prime.get(), index: w.index }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub tag: String,
    pub conditional: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rational_form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerator: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_form: Option<Vec<FactorReport>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<WitnessReport>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn coefficients(form: &RationalForm) -> (Vec<String>, Vec<String>) {
    (
        form.numerator().iter().map(ToString::to_string).collect(),
        form.denominator().iter().map(ToString::to_string).collect(),
    )
}

impl From<&DichotomyVerdict> for VerdictReport {
    fn from(v: &DichotomyVerdict) -> Self {
        let mut out = VerdictReport {
            tag: v.tag().to_string(),
            conditional: v.is_conditional(),
            rational_form: None,
            numerator: None,
            denominator: None,
            product_form: None,
            witness: None,
            witnesses: None,
            reason: None,
        };
        match v {
            DichotomyVerdict::Rational { product_form, rational_form, .. } => {
                let (num, den) = coefficients(rational_form);
                out.rational_form = Some(rational_form.to_string());
                out.numerator = Some(num);
                out.denominator = Some(den);
                out.product_form = product_form.as_ref().map(|pf| {
                    pf.factors.iter().map(|(w, c)| FactorReport { w: w.to_string(), c: c.to_string() }).collect()
                });
            }
            DichotomyVerdict::NaturalBoundary { witness, witnesses, .. } => {
                out.witness = Some(witness.into());
                out.witnesses = Some(witnesses.iter().map(Into::into).collect());
            }
            DichotomyVerdict::NotApplicable { reason } => out.reason = Some(reason.to_string()),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRow {
    pub n: u64,
    /// A count, `"inf"`, or absent when the engine failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    /// `match`, `mismatch`, `over-budget` or `skipped`.
    pub status: String,
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn to_table(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "command      {}", report.command);
    let _ = writeln!(s, "group        {}", report.group);
    let _ = writeln!(s, "spec sha256  {}", report.spec_sha256);
    if let Some(r) = &report.r_sequence {
        let _ = writeln!(s, "\n{:>4}  R_n", "n");
        for (i, v) in r.iter().enumerate() {
            let _ = writeln!(s, "{:>4}  {v}", i + 1);
        }
    }
    if let Some(z) = &report.zeta {
        let _ = writeln!(s, "\n{:>4}  a_m", "m");
        for (i, v) in z.iter().enumerate() {
            let _ = writeln!(s, "{i:>4}  {v}");
        }
    }
    if let Some(z) = &report.zstar {
        let _ = writeln!(s, "\nZ*(s) = {}  (recurrence of order {})", z.rational_form, z.order);
    }
    if let Some(v) = &report.verdict {
        let _ = writeln!(s, "\nverdict      {}{}", v.tag, if v.conditional { " (conditional)" } else { "" });
        if let Some(f) = &v.rational_form {
            let _ = writeln!(s, "Z(s)         {f}");
        }
        if let Some(pf) = &v.product_form {
            let parts: Vec<String> = pf
                .iter()
                .map(|f| match f.c.strip_prefix('-') {
                    Some(c) => format!("(1 - {} s)^{c}", f.w),
                    None => format!("(1 - {} s)^-{}", f.w, f.c),
                })
                .collect();
            let _ = writeln!(s, "product      {}", parts.join(" "));
        }
        if let Some(w) = &v.witness {
            let _ = writeln!(s, "witness      p = {}, i = {} (factor {})", w.prime, w.index, w.factor);
        }
        if let Some(r) = &v.reason {
            let _ = writeln!(s, "reason       {r}");
        }
    }
    if let Some(rows) = &report.oracle {
        let _ = writeln!(s, "\n{:>4}  {:>20}  {:>20}  status", "n", "engine", "oracle");
        for row in rows {
            let _ = writeln!(
                s,
                "{:>4}  {:>20}  {:>20}  {}",
                row.n,
                row.engine.as_deref().unwrap_or("-"),
                row.oracle.as_deref().unwrap_or("-"),
                row.status
            );
        }
    }
    for w in &report.warnings {
        let _ = writeln!(s, "\nwarning: {w}");
    }
    let _ = writeln!(s, "\ntime         {} ms", report.timing_ms);
    s
}
