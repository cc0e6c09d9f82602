use std::collections::BTreeSet;

use super::{Bound, EventBContext, Expr, Pred};
use crate::diag::{Code, Diagnostic, Location};

fn collect_expr(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match e {
        Expr::Ident(n) => {
            if !bound.contains(n) && !out.contains(n) {
                out.push(n.clone());
            }
        }
        Expr::SetLit(items) => items.iter().for_each(|i| collect_expr(i, bound, out)),
        Expr::Maplet(a, b) | Expr::Bin(_, a, b) => {
            collect_expr(a, bound, out);
            collect_expr(b, bound, out);
        }
        Expr::Pow(x) | Expr::Ran(x) | Expr::GenUnion(x) => collect_expr(x, bound, out),
        Expr::SetBuilder { var, pred } => {
            with_bound(std::slice::from_ref(var), bound, |b| {
                collect_pred(pred, b, out)
            });
        }
        Expr::Lambda { vars, pred, expr } => with_bound(vars, bound, |b| {
            collect_pred(pred, b, out);
            collect_expr(expr, b, out);
        }),
    }
}

fn with_bound(vars: &[Bound], bound: &mut Vec<String>, f: impl FnOnce(&mut Vec<String>)) {
    let n = bound.len();
    bound.extend(vars.iter().map(|v| v.name.clone()));
    f(bound);
    bound.truncate(n);
}

fn collect_pred(p: &Pred, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match p {
        Pred::In(a, b) | Pred::Subset(a, b) | Pred::Eq(a, b) => {
            collect_expr(a, bound, out);
            collect_expr(b, bound, out);
        }
        Pred::Partition(s, parts) => {
            collect_expr(s, bound, out);
            parts.iter().for_each(|x| collect_expr(x, bound, out));
        }
        Pred::And(items) | Pred::Or(items) => {
            items.iter().for_each(|x| collect_pred(x, bound, out))
        }
        Pred::Implies(a, b) | Pred::Iff(a, b) => {
            collect_pred(a, bound, out);
            collect_pred(b, bound, out);
        }
        Pred::Forall(vars, body) | Pred::Exists(vars, body) => {
            with_bound(vars, bound, |b| collect_pred(body, b, out))
        }
    }
}

/// Identifiers occurring free in an expression, in first-occurrence order.
pub fn free_identifiers(e: &Expr) -> Vec<String> {
    let mut out = Vec::new();
    collect_expr(e, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn free_identifiers_pred(p: &Pred) -> Vec<String> {
    let mut out = Vec::new();
    collect_pred(p, &mut Vec::new(), &mut out);
    out
}

fn type_carriers_pred(p: &Pred, out: &mut Vec<String>) {
    let push_vars = |vars: &[Bound], out: &mut Vec<String>| {
        for v in vars {
            let mut cs = Vec::new();
            v.ty.carriers(&mut cs);
            out.extend(cs.into_iter().map(str::to_string));
        }
    };
    fn in_expr(e: &Expr, out: &mut Vec<String>) {
        match e {
            Expr::Ident(_) => {}
            Expr::SetLit(items) => items.iter().for_each(|i| in_expr(i, out)),
            Expr::Maplet(a, b) | Expr::Bin(_, a, b) => {
                in_expr(a, out);
                in_expr(b, out);
            }
            Expr::Pow(x) | Expr::Ran(x) | Expr::GenUnion(x) => in_expr(x, out),
            Expr::SetBuilder { var, pred } => {
                let mut cs = Vec::new();
                var.ty.carriers(&mut cs);
                out.extend(cs.into_iter().map(str::to_string));
                type_carriers_pred(pred, out);
            }
            Expr::Lambda { vars, pred, expr } => {
                for v in vars {
                    let mut cs = Vec::new();
                    v.ty.carriers(&mut cs);
                    out.extend(cs.into_iter().map(str::to_string));
                }
                type_carriers_pred(pred, out);
                in_expr(expr, out);
            }
        }
    }
    match p {
        Pred::In(a, b) | Pred::Subset(a, b) | Pred::Eq(a, b) => {
            in_expr(a, out);
            in_expr(b, out);
        }
        Pred::Partition(s, parts) => {
            in_expr(s, out);
            parts.iter().for_each(|x| in_expr(x, out));
        }
        Pred::And(items) | Pred::Or(items) => items.iter().for_each(|x| type_carriers_pred(x, out)),
        Pred::Implies(a, b) | Pred::Iff(a, b) => {
            type_carriers_pred(a, out);
            type_carriers_pred(b, out);
        }
        Pred::Forall(vars, body) | Pred::Exists(vars, body) => {
            push_vars(vars, out);
            type_carriers_pred(body, out);
        }
    }
}

fn label_number(label: &str, prefix: &str) -> Option<usize> {
    let digits = label.strip_prefix(prefix)?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Checks the structural invariants of a context and resolves every
/// identifier against its own declarations and, through EXTENDS, `parent`'s.
pub fn check_context(ctx: &EventBContext, parent: Option<&EventBContext>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let diag =
        |code, msg: String| Diagnostic::error(code, Location::NONE, format!("{}: {msg}", ctx.name));

    match (&ctx.extends, parent) {
        (Some(name), Some(p)) if *name != p.name => out.push(diag(
            Code::UndeclaredIdentifier,
            format!("extends `{name}` but the supplied parent is `{}`", p.name),
        )),
        (None, Some(p)) => out.push(diag(
            Code::UndeclaredIdentifier,
            format!(
                "a parent `{}` was supplied but the context has no EXTENDS clause",
                p.name
            ),
        )),
        _ => {}
    }
    let parent = parent.filter(|p| ctx.extends.as_deref() == Some(p.name.as_str()));

    let mut seen: BTreeSet<&str> = BTreeSet::new();
    if let Some(p) = parent {
        seen.extend(p.sets.iter().chain(&p.constants).map(String::as_str));
    }
    for s in &ctx.sets {
        if ctx.constants.contains(s) {
            out.push(diag(
                Code::SetConstantClash,
                format!("`{s}` is declared both as a set and as a constant"),
            ));
        }
    }
    for name in ctx.sets.iter().chain(&ctx.constants) {
        if !seen.insert(name)
            && !ctx
                .sets
                .iter()
                .any(|s| s == name && ctx.constants.contains(s))
        {
            out.push(diag(
                Code::DuplicateDeclaration,
                format!("`{name}` is declared more than once"),
            ));
        }
    }

    let mut labels: BTreeSet<&str> = BTreeSet::new();
    for (items, prefix) in [(&ctx.axioms, "axm"), (&ctx.theorems, "thm")] {
        for (i, l) in items.iter().enumerate() {
            if !labels.insert(&l.label) {
                out.push(diag(
                    Code::DuplicateLabel,
                    format!("label `{}` is used more than once", l.label),
                ));
            } else if label_number(&l.label, prefix) != Some(i + 1) {
                out.push(diag(
                    Code::BadLabel,
                    format!("label `{}` should be `{prefix}{}`", l.label, i + 1),
                ));
            }
        }
    }

    let declared = ctx.declared(parent);
    let sets: Vec<&str> = ctx
        .sets
        .iter()
        .chain(parent.into_iter().flat_map(|p| &p.sets))
        .map(String::as_str)
        .collect();
    for l in ctx.axioms.iter().chain(&ctx.theorems) {
        for ident in free_identifiers_pred(&l.pred) {
            if !declared.contains(&ident.as_str()) {
                out.push(diag(
                    Code::UndeclaredIdentifier,
                    format!("{}: identifier `{ident}` is not declared", l.label),
                ));
            }
        }
        let mut carriers = Vec::new();
        type_carriers_pred(&l.pred, &mut carriers);
        carriers.sort();
        carriers.dedup();
        for c in carriers {
            if !sets.contains(&c.as_str()) {
                out.push(diag(
                    Code::UndeclaredIdentifier,
                    format!(
                        "{}: bound variable type uses `{c}`, which is not a carrier set",
                        l.label
                    ),
                ));
            }
        }
    }
    out
}
