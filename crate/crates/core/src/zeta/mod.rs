//! Zeta series, rational closed forms and the rational/natural-boundary
//! classifier.

mod dichotomy;
mod recurrence;
mod series;

use thiserror::Error;

use crate::arith::ArithError;
use crate::engine::EngineError;

pub use dichotomy::{
    classify_dichotomy, gf_decomposition, ClassifyOptions, DichotomyVerdict, GfDecomposition,
    NotApplicableReason, ProductForm, Witness,
};
pub use recurrence::{
    berlekamp_massey, detect_linear_recurrence, fit_rational_series, LinearRecurrence, RationalForm,
};
pub use series::{counts_to_rats, expand_product_form, zeta_coefficients, zstar_series, ZetaSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no linear recurrence of order <= {max_order} fits the {terms} supplied terms (not a proof of irrationality)")]
    NoRecurrenceFound { max_order: usize, terms: usize },
    #[error("recurrence detection needs at least {needed} terms, got {got}")]
    InsufficientTerms { needed: usize, got: usize },
    #[error("not applicable: {0}")]
    NotApplicable(NotApplicableReason),
}
