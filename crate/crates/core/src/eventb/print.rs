//! Deterministic text rendering of contexts.
//!
//! Expression precedence, loosest first:
//!
//! | level | operators                     | grouping               |
//! |-------|-------------------------------|------------------------|
//! | 1     | `↦`                           | left                   |
//! | 2     | `↔`                           | none                   |
//! | 3     | `∪` `∩` `×` `◁`               | left, no mixing        |
//! | 4     | names, literals, `ℙ(..)`, `ran(..)`, `union(..)`, comprehensions | |
//!
//! Predicates: `⇒` and `⇔` are loosest and never chain without parentheses;
//! `∧` and `∨` never mix without parentheses. A quantifier used as an operand
//! of a connective is parenthesized, except as the right operand of `⇒`.
//! Quantifier bodies are always parenthesized. Union and intersection
//! operands of `=` are parenthesized.

use std::fmt::Write as _;

use thiserror::Error;

use super::{check::free_identifiers_pred, Bound, EventBContext, Expr, Pred, SetOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Ascii,
    Unicode,
}

struct Tokens {
    member: &'static str,
    subset: &'static str,
    union: &'static str,
    inter: &'static str,
    maplet: &'static str,
    rel: &'static str,
    product: &'static str,
    dom_res: &'static str,
    forall: &'static str,
    exists: &'static str,
    implies: &'static str,
    iff: &'static str,
    and: &'static str,
    or: &'static str,
    qdot: &'static str,
    pow: &'static str,
    empty: &'static str,
}

const ASCII: Tokens = Tokens {
    member: ":",
    subset: "<:",
    union: "\\/",
    inter: "/\\",
    maplet: "|->",
    rel: "<->",
    product: "**",
    dom_res: "<|",
    forall: "!",
    exists: "#",
    implies: "=>",
    iff: "<=>",
    and: "&",
    or: "or",
    qdot: ".",
    pow: "POW",
    empty: "{}",
};

const UNICODE: Tokens = Tokens {
    member: "∈",
    subset: "⊆",
    union: "∪",
    inter: "∩",
    maplet: "↦",
    rel: "↔",
    product: "×",
    dom_res: "◁",
    forall: "∀",
    exists: "∃",
    implies: "⇒",
    iff: "⇔",
    and: "∧",
    or: "∨",
    qdot: "·",
    pow: "ℙ",
    empty: "∅",
};

impl Style {
    fn tokens(self) -> &'static Tokens {
        match self {
            Style::Ascii => &ASCII,
            Style::Unicode => &UNICODE,
        }
    }

    /// File-name-safe name of the style.
    pub fn name(self) -> &'static str {
        match self {
            Style::Ascii => "ascii",
            Style::Unicode => "unicode",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrintError {
    #[error("{label}: identifier `{ident}` is not declared in context `{context}` or its parent")]
    Undeclared {
        context: String,
        label: String,
        ident: String,
    },
}

fn expr_level(e: &Expr) -> u8 {
    match e {
        Expr::Maplet(..) => 1,
        Expr::Bin(SetOp::Rel, ..) => 2,
        Expr::Bin(..) => 3,
        _ => 4,
    }
}

struct Printer {
    t: &'static Tokens,
    out: String,
}

impl Printer {
    fn bound(&mut self, vars: &[Bound]) {
        let names: Vec<&str> = vars.iter().map(|b| b.name.as_str()).collect();
        self.out.push_str(&names.join(","));
    }

    fn op_token(&self, op: SetOp) -> &'static str {
        match op {
            SetOp::Union => self.t.union,
            SetOp::Inter => self.t.inter,
            SetOp::Rel => self.t.rel,
            SetOp::Product => self.t.product,
            SetOp::DomRes => self.t.dom_res,
        }
    }

    fn wrapped_expr(&mut self, e: &Expr, parens: bool) {
        if parens {
            self.out.push('(');
            self.expr(e);
            self.out.push(')');
        } else {
            self.expr(e);
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Ident(n) => self.out.push_str(n),
            Expr::SetLit(items) if items.is_empty() => self.out.push_str(self.t.empty),
            Expr::SetLit(items) => {
                self.out.push('{');
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.expr(it);
                }
                self.out.push('}');
            }
            Expr::Maplet(a, b) => {
                self.wrapped_expr(a, expr_level(a) < 1);
                let _ = write!(self.out, " {} ", self.t.maplet);
                self.wrapped_expr(b, expr_level(b) <= 1);
            }
            Expr::Bin(op, a, b) => {
                let level = expr_level(e);
                let left_parens = match &**a {
                    Expr::Bin(op2, ..) if expr_level(a) == level => {
                        *op2 != *op || *op == SetOp::Rel
                    }
                    _ => expr_level(a) < level,
                };
                let right_parens = expr_level(b) <= level;
                self.wrapped_expr(a, left_parens);
                let _ = write!(self.out, " {} ", self.op_token(*op));
                self.wrapped_expr(b, right_parens);
            }
            Expr::Pow(x) => {
                self.out.push_str(self.t.pow);
                self.wrapped_expr(x, true);
            }
            Expr::Ran(x) => {
                self.out.push_str("ran");
                self.wrapped_expr(x, true);
            }
            Expr::GenUnion(x) => {
                self.out.push_str("union");
                self.wrapped_expr(x, true);
            }
            Expr::SetBuilder { var, pred } => {
                self.out.push('{');
                self.out.push_str(&var.name);
                self.out.push_str(" | ");
                self.pred(pred);
                self.out.push('}');
            }
            Expr::Lambda { vars, pred, expr } => {
                self.out.push('{');
                self.bound(vars);
                let _ = write!(self.out, " {} ", self.t.qdot);
                self.pred(pred);
                self.out.push_str(" | ");
                self.expr(expr);
                self.out.push('}');
            }
        }
    }

    fn eq_operand(&mut self, e: &Expr) {
        let parens = matches!(e, Expr::Bin(SetOp::Union | SetOp::Inter, ..));
        self.wrapped_expr(e, parens);
    }

    fn wrapped_pred(&mut self, p: &Pred, parens: bool) {
        if parens {
            self.out.push('(');
            self.pred(p);
            self.out.push(')');
        } else {
            self.pred(p);
        }
    }

    fn pred(&mut self, p: &Pred) {
        match p {
            Pred::In(a, b) => {
                self.expr(a);
                let _ = write!(self.out, " {} ", self.t.member);
                self.expr(b);
            }
            Pred::Subset(a, b) => {
                self.expr(a);
                let _ = write!(self.out, " {} ", self.t.subset);
                self.expr(b);
            }
            Pred::Eq(a, b) => {
                self.eq_operand(a);
                self.out.push_str(" = ");
                self.eq_operand(b);
            }
            Pred::Partition(s, parts) => {
                self.out.push_str("partition(");
                self.expr(s);
                for part in parts {
                    self.out.push_str(", ");
                    self.expr(part);
                }
                self.out.push(')');
            }
            Pred::And(items) | Pred::Or(items) => {
                let tok = if matches!(p, Pred::And(_)) {
                    self.t.and
                } else {
                    self.t.or
                };
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        let _ = write!(self.out, " {tok} ");
                    }
                    // nested conjunctions stay visible so distinct trees print distinctly
                    let parens = !matches!(
                        it,
                        Pred::In(..) | Pred::Subset(..) | Pred::Eq(..) | Pred::Partition(..)
                    );
                    self.wrapped_pred(it, parens);
                }
            }
            Pred::Implies(a, b) | Pred::Iff(a, b) => {
                let tok = if matches!(p, Pred::Implies(..)) {
                    self.t.implies
                } else {
                    self.t.iff
                };
                let loose = |q: &Pred| matches!(q, Pred::Implies(..) | Pred::Iff(..));
                let quant = |q: &Pred| matches!(q, Pred::Forall(..) | Pred::Exists(..));
                self.wrapped_pred(a, loose(a) || quant(a));
                let _ = write!(self.out, " {tok} ");
                let right_quant_ok = matches!(p, Pred::Implies(..));
                self.wrapped_pred(b, loose(b) || (quant(b) && !right_quant_ok));
            }
            Pred::Forall(vars, body) | Pred::Exists(vars, body) => {
                let tok = if matches!(p, Pred::Forall(..)) {
                    self.t.forall
                } else {
                    self.t.exists
                };
                self.out.push_str(tok);
                self.bound(vars);
                self.out.push_str(self.t.qdot);
                self.wrapped_pred(body, true);
            }
        }
    }
}

pub fn print_expr(e: &Expr, style: Style) -> String {
    let mut p = Printer {
        t: style.tokens(),
        out: String::new(),
    };
    p.expr(e);
    p.out
}

pub fn print_pred(pred: &Pred, style: Style) -> String {
    let mut p = Printer {
        t: style.tokens(),
        out: String::new(),
    };
    p.pred(pred);
    p.out
}

const INDENT: &str = "    ";

/// Renders a context in clause order CONTEXT, EXTENDS, SETS, CONSTANTS,
/// AXIOMS, THEOREMS, END. Empty clauses are left out.
///
/// `parent` supplies the declarations inherited through EXTENDS; every
/// identifier in an axiom or theorem must resolve to a declaration or a bound
/// variable.
pub fn print_context(
    ctx: &EventBContext,
    parent: Option<&EventBContext>,
    style: Style,
) -> Result<String, PrintError> {
    let declared = ctx.declared(parent);
    for l in ctx.axioms.iter().chain(&ctx.theorems) {
        for ident in free_identifiers_pred(&l.pred) {
            if !declared.contains(&ident.as_str()) {
                return Err(PrintError::Undeclared {
                    context: ctx.name.clone(),
                    label: l.label.clone(),
                    ident,
                });
            }
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "CONTEXT {}", ctx.name);
    if let Some(parent) = &ctx.extends {
        let _ = writeln!(out, "EXTENDS {parent}");
    }
    if !ctx.sets.is_empty() {
        let _ = writeln!(out, "SETS\n{INDENT}{}", ctx.sets.join(" "));
    }
    if !ctx.constants.is_empty() {
        let _ = writeln!(out, "CONSTANTS\n{INDENT}{}", ctx.constants.join(" "));
    }
    for (clause, items) in [("AXIOMS", &ctx.axioms), ("THEOREMS", &ctx.theorems)] {
        if items.is_empty() {
            continue;
        }
        out.push_str(clause);
        out.push('\n');
        for l in items {
            let _ = writeln!(out, "{INDENT}{}: {}", l.label, print_pred(&l.pred, style));
        }
    }
    out.push_str("END\n");
    Ok(out)
}
