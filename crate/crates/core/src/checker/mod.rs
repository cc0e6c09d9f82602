//! Finite-model checker: evaluates generated contexts over a finite
//! interpretation by exhaustive enumeration.

mod eval;
mod interp;
mod report;
mod value;

pub use eval::{
    Binding, Env, EvalError, EvalErrorKind, EvalResult, Evaluator, Reason, Trace, DEFAULT_CAP,
};
pub use interp::{bind_definitions, derive_interpretation, Encoding, FiniteInterpretation};
pub use report::{
    check_context_against, CheckError, CheckReport, CheckStatus, EntryKind, ReportEntry,
};
pub use value::{Lazy, Val, Value};

use crate::eventb::Pred;

/// Evaluates `pred` under `interp` with the default cap.
pub fn eval_predicate(pred: &Pred, interp: &FiniteInterpretation) -> Result<EvalResult, EvalError> {
    Evaluator::new(interp).eval(pred)
}
