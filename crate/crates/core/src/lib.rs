//! OWL ontologies to Event-B contexts.
//!
//! The pipeline reads a subset of OWL ([`owl`]), normalizes it into a
//! language-neutral [`pivot`] model, and emits Event-B contexts under two
//! encodings: [`shallow`] (classes as subsets of `Thing`) and [`deep`] (a
//! generic ontology-model context plus an ontology-specific extension).
//! [`checker`] evaluates the emitted axioms and theorems exhaustively over
//! finite interpretations.

pub mod checker;
pub mod deep;
pub mod diag;
pub mod eventb;
pub mod owl;
pub mod pipeline;
pub mod pivot;
pub mod shallow;

pub use diag::{Code, Diagnostic, Location, Severity};
pub use eventb::{EventBContext, Expr, Pred, Style};
pub use owl::{parse_owl, OwlDocument};
pub use pivot::{to_pivot, validate_pivot, PivotOntology};
