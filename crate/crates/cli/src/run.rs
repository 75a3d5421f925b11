//! The four commands. Each returns a finished report; a failure that still
//! has something to show (an oracle mismatch) comes back alongside it.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use reidzeta::engine::{r_sequence, system_r, EngineError, RValue};
use reidzeta::group::{EndoSystem, NilpotentFactor};
use reidzeta::oracle::{brute_force_abelian_r, OracleError};
use reidzeta::zeta::{
    classify_dichotomy, counts_to_rats, detect_linear_recurrence, zeta_coefficients, ClassifyOptions, ZetaError,
};
use sha2::{Digest, Sha256};

use crate::input::{parse_problem, Problem};
use crate::report::{OracleRow, Report, VerdictReport, ZstarReport, REPORT_SCHEMA};
use crate::CliError;

/// Largest recurrence order searched by `zeta` when none is given.
pub const DEFAULT_ZSTAR_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Compute { max_n: u64 },
    Zeta { terms: u64, max_order: Option<usize> },
    Classify { terms: usize, max_order: usize },
    OracleCheck { max_n: u64, budget: u64 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Compute { .. } => "compute",
            Command::Zeta { .. } => "zeta",
            Command::Classify { .. } => "classify",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }
}

/// A report plus the error that decides the exit status, if any.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CliError>,
}

pub fn run(command: Command, spec_text: &str) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let problem = parse_problem(spec_text)?;
    let mut report = Report {
        schema: REPORT_SCHEMA.to_string(),
        command: command.name().to_string(),
        spec_sha256: hex(&Sha256::digest(spec_text.as_bytes())),
        group: problem.description.clone(),
        r_sequence: None,
        zeta: None,
        zstar: None,
        verdict: None,
        oracle: None,
        conditional: false,
        warnings: Vec::new(),
        timing_ms: 0,
    };
    if let Some(note) = problem.external.as_ref().and_then(|e| e.embedding_note.as_ref()) {
        report.warnings.push(format!("embedding: {note}"));
    }
    let failure = match command {
        Command::Compute { max_n } => {
            report.r_sequence = Some(strings(&r_sequence(&problem.system, max_n)?));
            None
        }
        Command::Zeta { terms, max_order } => {
            zeta(&problem, terms, max_order, &mut report)?;
            None
        }
        Command::Classify { terms, max_order } => {
            let opts = ClassifyOptions { terms, max_order };
            let verdict = classify_dichotomy(&problem.system, problem.external.as_ref(), &opts)?;
            report.conditional = verdict.is_conditional();
            if report.conditional {
                report.warnings.push("verdict conditional on user eigendata".to_string());
            }
            report.verdict = Some(VerdictReport::from(&verdict));
            None
        }
        Command::OracleCheck { max_n, budget } => oracle_check(&problem.system, max_n, budget, &mut report)?,
    };
    report.timing_ms = start.elapsed().as_millis() as u64;
    Ok(Outcome { report, failure })
}

fn zeta(problem: &Problem, terms: u64, max_order: Option<usize>, report: &mut Report) -> Result<(), CliError> {
    let r = counts_to_rats(&r_sequence(&problem.system, terms)?);
    report.zeta = Some(zeta_coefficients(&r).coefficients().iter().map(ToString::to_string).collect());
    // detection verifies the fit on at least four extra terms
    let supported = (r.len().saturating_sub(4) / 2).min(DEFAULT_ZSTAR_ORDER);
    let order = match max_order {
        Some(o) if o > supported => {
            report.warnings.push(format!(
                "--max-order {o} needs {} terms; searching up to order {supported}",
                2 * o + 4
            ));
            supported
        }
        Some(o) => o,
        None => supported,
    };
    if order == 0 {
        report.warnings.push("too few terms to search for a recurrence for R_n".to_string());
        return Ok(());
    }
    match detect_linear_recurrence(&r, order) {
        Ok(rec) => report.zstar = Some(ZstarReport::new(&rec)),
        Err(e @ ZetaError::NoRecurrenceFound { .. }) => report.warnings.push(e.to_string()),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

enum FactorCount {
    Count(u64),
    Infinite,
    OverBudget,
}

fn factor_oracle(factor: &NilpotentFactor, n: u64, budget: u64) -> Result<FactorCount, CliError> {
    let p = factor.pair().pow(n)?;
    match brute_force_abelian_r(&p.phi, &p.psi, budget) {
        Ok(c) => Ok(FactorCount::Count(c)),
        Err(OracleError::SingularDifference) => Ok(FactorCount::Infinite),
        Err(OracleError::BudgetExceeded { .. }) => Ok(FactorCount::OverBudget),
        Err(e) => Err(CliError::Internal(e.to_string())),
    }
}

fn oracle_check(system: &EndoSystem, max_n: u64, budget: u64, report: &mut Report) -> Result<Option<CliError>, CliError> {
    let factors = system.factors();
    let integral = factors.iter().all(|f| f.group().inverted_primes().is_empty());
    if !integral {
        report.warnings.push("the brute-force oracle only covers Z^d; every n skipped".to_string());
    }
    let mut rows = Vec::with_capacity(max_n as usize);
    for n in 1..=max_n {
        let engine = match system_r(system, n) {
            Ok(RValue::Finite(v)) => Some(v.to_string()),
            Ok(RValue::Infinite) | Err(EngineError::HypothesisViolation { .. }) => Some("inf".to_string()),
            Err(e) => return Err(e.into()),
        };
        if !integral {
            rows.push(OracleRow { n, engine, oracle: None, status: "skipped".to_string() });
            continue;
        }
        let mut product = Some(BigUint::one());
        let mut over_budget = false;
        for f in factors {
            match factor_oracle(f, n, budget)? {
                FactorCount::Count(c) => product = product.map(|p| p * c),
                FactorCount::Infinite => product = None,
                FactorCount::OverBudget => over_budget = true,
            }
        }
        let (oracle, status) = if over_budget {
            (None, "over-budget")
        } else {
            let oracle = product.map_or_else(|| "inf".to_string(), |p| p.to_string());
            let status = if engine.as_deref() == Some(oracle.as_str()) { "match" } else { "mismatch" };
            (Some(oracle), status)
        };
        rows.push(OracleRow { n, engine, oracle, status: status.to_string() });
    }
    let mismatches: Vec<u64> = rows.iter().filter(|r| r.status == "mismatch").map(|r| r.n).collect();
    let over: Vec<u64> = rows.iter().filter(|r| r.status == "over-budget").map(|r| r.n).collect();
    report.oracle = Some(rows);
    Ok(if !mismatches.is_empty() {
        Some(CliError::Mismatch(format!("engine and oracle disagree at n = {mismatches:?}")))
    } else if !over.is_empty() {
        Some(CliError::Budget(format!("oracle budget of {budget} cells exceeded at n = {over:?}")))
    } else {
        None
    })
}

fn strings(r: &[BigUint]) -> Vec<String> {
    r.iter().map(ToString::to_string).collect()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
