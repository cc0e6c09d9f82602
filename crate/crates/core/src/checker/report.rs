use std::fmt;

use serde::Serialize;

use super::eval::{EvalError, Evaluator, Trace};
use super::interp::FiniteInterpretation;
use crate::eventb::EventBContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Axiom,
    Theorem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub context: String,
    pub label: String,
    pub kind: EntryKind,
    pub value: bool,
    pub trace: Option<Trace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    AllTrue,
    AxiomFalse,
    TheoremFalse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub status: CheckStatus,
    pub entries: Vec<ReportEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{context}.{label}: {error}")]
pub struct CheckError {
    pub context: String,
    pub label: String,
    pub error: EvalError,
}

impl CheckReport {
    pub fn entry(&self, context: &str, label: &str) -> Option<&ReportEntry> {
        self.entries
            .iter()
            .find(|e| e.context == context && e.label == label)
    }

    pub fn all_true(&self) -> bool {
        self.status == CheckStatus::AllTrue
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// One line per label: `context.label  TRUE|FALSE  [trace]`.
impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("{}.{}", e.context, e.label))
            .collect();
        let width = names.iter().map(String::len).max().unwrap_or(0);
        for (name, e) in names.iter().zip(&self.entries) {
            let value = if e.value { "TRUE" } else { "FALSE" };
            match &e.trace {
                Some(t) => writeln!(f, "{name:width$}  {value:5}  {t}")?,
                None => writeln!(f, "{name:width$}  {value}")?,
            }
        }
        Ok(())
    }
}

/// Evaluates the parent's axioms and theorems, then the context's, under
/// `interp`.
pub fn check_context_against(
    ctx: &EventBContext,
    parent: Option<&EventBContext>,
    interp: &FiniteInterpretation,
    cap: u64,
) -> Result<CheckReport, CheckError> {
    let ev = Evaluator::new(interp).with_cap(cap);
    let mut entries = Vec::new();
    for c in parent.into_iter().chain([ctx]) {
        let items = c
            .axioms
            .iter()
            .map(|l| (l, EntryKind::Axiom))
            .chain(c.theorems.iter().map(|l| (l, EntryKind::Theorem)));
        for (l, kind) in items {
            let r = ev.eval(&l.pred).map_err(|error| CheckError {
                context: c.name.clone(),
                label: l.label.clone(),
                error,
            })?;
            entries.push(ReportEntry {
                context: c.name.clone(),
                label: l.label.clone(),
                kind,
                value: r.value,
                trace: r.trace,
            });
        }
    }
    let false_of = |k| entries.iter().any(|e| e.kind == k && !e.value);
    let status = if false_of(EntryKind::Axiom) {
        CheckStatus::AxiomFalse
    } else if false_of(EntryKind::Theorem) {
        CheckStatus::TheoremFalse
    } else {
        CheckStatus::AllTrue
    };
    Ok(CheckReport { status, entries })
}
