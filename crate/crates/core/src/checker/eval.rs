use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::Serialize;

use super::value::{Lazy, Val, Value};
use super::FiniteInterpretation;
use crate::diag::Code;
use crate::eventb::{free_identifiers, Bound, Expr, Pred, SetOp, Type};

/// Default bound on materialized set sizes and on bindings enumerated by a
/// single quantifier or comprehension.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalErrorKind {
    Unbound(String),
    IllTyped(String),
    DomainTooLarge { what: String, cap: u64 },
}

impl EvalErrorKind {
    pub fn code(&self) -> Code {
        match self {
            EvalErrorKind::Unbound(_) => Code::UnboundIdentifier,
            EvalErrorKind::IllTyped(_) => Code::IllTyped,
            EvalErrorKind::DomainTooLarge { .. } => Code::DomainTooLarge,
        }
    }
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalErrorKind::Unbound(n) => write!(f, "unbound identifier `{n}`"),
            EvalErrorKind::IllTyped(m) => f.write_str(m),
            EvalErrorKind::DomainTooLarge { what, cap } => {
                write!(f, "{what} exceeds the cap of {cap} elements")
            }
        }
    }
}

/// Evaluation failure. `path` locates the failing node, outermost first.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub path: Vec<String>,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.kind.code().as_str())?;
        if !self.path.is_empty() {
            write!(f, "at {}: ", self.path.join(" > "))?;
        }
        write!(f, "{}", self.kind)
    }
}

impl EvalError {
    fn new(kind: EvalErrorKind) -> Self {
        EvalError {
            kind,
            path: Vec::new(),
        }
    }
}

fn ill_typed<T>(msg: String) -> Result<T, EvalError> {
    Err(EvalError::new(EvalErrorKind::IllTyped(msg)))
}

trait At<T> {
    fn at(self, seg: impl FnOnce() -> String) -> Result<T, EvalError>;
}

impl<T> At<T> for Result<T, EvalError> {
    fn at(self, seg: impl FnOnce() -> String) -> Result<T, EvalError> {
        self.map_err(|mut e| {
            e.path.insert(0, seg());
            e
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Binding {
    pub name: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reason {
    NoWitness {
        vars: Vec<String>,
    },
    PartitionOverlap {
        element: Value,
        first: usize,
        second: usize,
    },
    PartitionExtra {
        element: Value,
        part: usize,
    },
    PartitionMissing {
        element: Value,
    },
}

/// Why a predicate is false: the falsifying bindings of enclosing universal
/// quantifiers, outermost first, and what failed underneath them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub bindings: Vec<Binding>,
    pub reason: Option<Reason>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binds: Vec<String> = self
            .bindings
            .iter()
            .map(|b| format!("{} = {}", b.name, b.value))
            .collect();
        f.write_str(&binds.join(", "))?;
        let Some(reason) = &self.reason else {
            return Ok(());
        };
        if !binds.is_empty() {
            f.write_str("; ")?;
        }
        match reason {
            Reason::NoWitness { vars } => write!(f, "no witness for {}", vars.join(", ")),
            Reason::PartitionOverlap {
                element,
                first,
                second,
            } => {
                write!(f, "{element} is in parts {first} and {second}")
            }
            Reason::PartitionExtra { element, part } => {
                write!(f, "{element} in part {part} is not in the set")
            }
            Reason::PartitionMissing { element } => write!(f, "{element} is in no part"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalResult {
    pub value: bool,
    pub trace: Option<Trace>,
}

impl EvalResult {
    fn of(value: bool) -> Self {
        EvalResult { value, trace: None }
    }
}

struct Local {
    name: String,
    value: Value,
    next: Option<Rc<Local>>,
}

/// Identifier bindings: constants and carriers from the interpretation plus
/// bound variables.
#[derive(Clone)]
pub struct Env {
    consts: Rc<HashMap<String, Val>>,
    carriers: Rc<HashMap<String, Rc<Vec<Value>>>>,
    locals: Option<Rc<Local>>,
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Env").finish_non_exhaustive()
    }
}

impl Env {
    fn lookup(&self, name: &str) -> Option<Val> {
        let mut cur = self.locals.as_deref();
        while let Some(l) = cur {
            if l.name == name {
                return Some(Val::Concrete(l.value.clone()));
            }
            cur = l.next.as_deref();
        }
        self.consts.get(name).cloned()
    }

    fn bind(&self, name: &str, value: Value) -> Env {
        Env {
            consts: self.consts.clone(),
            carriers: self.carriers.clone(),
            locals: Some(Rc::new(Local {
                name: name.to_string(),
                value,
                next: self.locals.clone(),
            })),
        }
    }
}

enum Domain {
    Items(Rc<Vec<Value>>),
    /// Every subset of the base, in binary-counting order from the empty set.
    Subsets(Vec<Value>),
}

fn subset_at(base: &[Value], mask: u64) -> Value {
    Value::set(
        base.iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, v)| v.clone()),
    )
}

fn mentions(e: &Expr, var: &str) -> bool {
    free_identifiers(e).iter().any(|n| n == var)
}

/// Whether `e` is monotone (w.r.t. inclusion) in the set-valued variable.
fn monotone(e: &Expr, var: &str) -> bool {
    if !mentions(e, var) {
        return true;
    }
    match e {
        Expr::Ident(_) => true,
        Expr::Bin(_, a, b) => monotone(a, var) && monotone(b, var),
        Expr::Ran(x) | Expr::Pow(x) | Expr::GenUnion(x) => monotone(x, var),
        _ => false,
    }
}

/// Predicate evaluator over one interpretation.
pub struct Evaluator {
    env: Env,
    cap: u64,
}

impl Evaluator {
    pub fn new(interp: &FiniteInterpretation) -> Self {
        let mut consts: HashMap<String, Val> = HashMap::new();
        let mut carriers = HashMap::new();
        for (name, dom) in &interp.carrier_domains {
            consts.insert(name.clone(), Value::set(dom.iter().cloned()).into());
            carriers.insert(name.clone(), Rc::new(dom.clone()));
        }
        for (name, v) in &interp.constant_values {
            consts.insert(name.clone(), v.clone());
        }
        Evaluator {
            env: Env {
                consts: Rc::new(consts),
                carriers: Rc::new(carriers),
                locals: None,
            },
            cap: DEFAULT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn is_bound(&self, name: &str) -> bool {
        self.env.consts.contains_key(name)
    }

    /// Adds or replaces a constant. Intensional values bound earlier keep the
    /// environment they closed over.
    pub fn bind_constant(&mut self, name: &str, v: Val) {
        Rc::make_mut(&mut self.env.consts).insert(name.to_string(), v);
    }

    pub fn eval(&self, p: &Pred) -> Result<EvalResult, EvalError> {
        self.pred(p, &self.env)
    }

    /// Evaluates an expression, leaving powersets and comprehensions
    /// intensional.
    pub fn eval_expr(&self, e: &Expr) -> Result<Val, EvalError> {
        self.expr(e, &self.env)
    }

    /// Evaluates an expression to a fully materialized value.
    pub fn materialize(&self, e: &Expr) -> Result<Value, EvalError> {
        self.value(e, &self.env)
    }

    fn too_large<T>(&self, what: String) -> Result<T, EvalError> {
        Err(EvalError::new(EvalErrorKind::DomainTooLarge {
            what,
            cap: self.cap,
        }))
    }

    fn domain(&self, ty: &Type, env: &Env) -> Result<Domain, EvalError> {
        match ty {
            Type::Carrier(c) => match env.carriers.get(c) {
                Some(d) => Ok(Domain::Items(d.clone())),
                None => Err(EvalError::new(EvalErrorKind::Unbound(c.clone()))),
            },
            Type::Pow(t) => {
                let base = self.domain_items(t, env)?;
                if base.len() >= 64 {
                    return self.too_large(format!("powerset of a {}-element domain", base.len()));
                }
                Ok(Domain::Subsets(base.to_vec()))
            }
            Type::Prod(a, b) => {
                let (a, b) = (self.domain_items(a, env)?, self.domain_items(b, env)?);
                if (a.len() as u128) * (b.len() as u128) > self.cap as u128 {
                    return self.too_large(format!(
                        "product domain of {} x {} elements",
                        a.len(),
                        b.len()
                    ));
                }
                let items = a
                    .iter()
                    .flat_map(|x| b.iter().map(move |y| Value::pair(x.clone(), y.clone())))
                    .collect();
                Ok(Domain::Items(Rc::new(items)))
            }
        }
    }

    fn domain_items(&self, ty: &Type, env: &Env) -> Result<Rc<Vec<Value>>, EvalError> {
        match self.domain(ty, env)? {
            Domain::Items(items) => Ok(items),
            Domain::Subsets(base) => {
                if base.len() >= 64 || 1u64 << base.len() > self.cap {
                    return self.too_large(format!("powerset of a {}-element domain", base.len()));
                }
                Ok(Rc::new(
                    (0..1u64 << base.len())
                        .map(|m| subset_at(&base, m))
                        .collect(),
                ))
            }
        }
    }

    /// Calls `f` once per binding of `vars` (first variable outermost) until
    /// it returns `false`.
    fn for_each_binding(
        &self,
        vars: &[Bound],
        env: &Env,
        f: &mut dyn FnMut(&Env) -> Result<bool, EvalError>,
    ) -> Result<(), EvalError> {
        let domains = vars
            .iter()
            .map(|v| self.domain(&v.ty, env))
            .collect::<Result<Vec<_>, _>>()?;
        let mut steps = 0u64;
        self.walk(vars, &domains, env, &mut steps, f).map(|_| ())
    }

    fn walk(
        &self,
        vars: &[Bound],
        domains: &[Domain],
        env: &Env,
        steps: &mut u64,
        f: &mut dyn FnMut(&Env) -> Result<bool, EvalError>,
    ) -> Result<bool, EvalError> {
        let Some((var, rest)) = vars.split_first() else {
            *steps += 1;
            if *steps > self.cap {
                return self.too_large("binding enumeration".into());
            }
            return f(env);
        };
        match &domains[0] {
            Domain::Items(items) => {
                for v in items.iter() {
                    if !self.walk(
                        rest,
                        &domains[1..],
                        &env.bind(&var.name, v.clone()),
                        steps,
                        f,
                    )? {
                        return Ok(false);
                    }
                }
            }
            Domain::Subsets(base) => {
                for mask in 0..1u64 << base.len() {
                    if !self.walk(
                        rest,
                        &domains[1..],
                        &env.bind(&var.name, subset_at(base, mask)),
                        steps,
                        f,
                    )? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    fn pred(&self, p: &Pred, env: &Env) -> Result<EvalResult, EvalError> {
        match p {
            Pred::In(a, s) => {
                let x = self.value(a, env).at(|| "in.lhs".into())?;
                let s = self.expr(s, env).at(|| "in.rhs".into())?;
                self.member(&x, &s).at(|| "in".into())
            }
            Pred::Subset(a, b) => {
                let a = self.expr(a, env).at(|| "subset.lhs".into())?;
                let b = self.expr(b, env).at(|| "subset.rhs".into())?;
                self.subset(&a, &b).at(|| "subset".into())
            }
            Pred::Eq(a, b) => {
                let a = self.expr(a, env).at(|| "eq.lhs".into())?;
                let b = self.expr(b, env).at(|| "eq.rhs".into())?;
                self.equal(&a, &b).map(EvalResult::of).at(|| "eq".into())
            }
            Pred::Partition(s, parts) => self.partition(s, parts, env).at(|| "partition".into()),
            Pred::And(items) => {
                for (i, it) in items.iter().enumerate() {
                    let r = self.pred(it, env).at(|| format!("and[{}]", i + 1))?;
                    if !r.value {
                        return Ok(r);
                    }
                }
                Ok(EvalResult::of(true))
            }
            Pred::Or(items) => {
                for (i, it) in items.iter().enumerate() {
                    if self.pred(it, env).at(|| format!("or[{}]", i + 1))?.value {
                        return Ok(EvalResult::of(true));
                    }
                }
                Ok(EvalResult::of(false))
            }
            Pred::Implies(a, b) => {
                if !self.pred(a, env).at(|| "implies.lhs".into())?.value {
                    return Ok(EvalResult::of(true));
                }
                self.pred(b, env).at(|| "implies.rhs".into())
            }
            Pred::Iff(a, b) => {
                let a = self.pred(a, env).at(|| "iff.lhs".into())?.value;
                let b = self.pred(b, env).at(|| "iff.rhs".into())?.value;
                Ok(EvalResult::of(a == b))
            }
            Pred::Forall(vars, body) => {
                let mut failure = None;
                self.for_each_binding(vars, env, &mut |e| {
                    let r = self.pred(body, e)?;
                    if !r.value {
                        failure = Some((bindings(vars, e), r.trace));
                    }
                    Ok(r.value)
                })
                .at(|| format!("forall {}", names(vars)))?;
                Ok(match failure {
                    None => EvalResult::of(true),
                    Some((mut bindings, inner)) => {
                        let mut reason = None;
                        if let Some(t) = inner {
                            bindings.extend(t.bindings);
                            reason = t.reason;
                        }
                        EvalResult {
                            value: false,
                            trace: Some(Trace { bindings, reason }),
                        }
                    }
                })
            }
            Pred::Exists(vars, body) => {
                let mut found = false;
                self.for_each_binding(vars, env, &mut |e| {
                    found = self.pred(body, e)?.value;
                    Ok(!found)
                })
                .at(|| format!("exists {}", names(vars)))?;
                Ok(if found {
                    EvalResult::of(true)
                } else {
                    let vars = vars.iter().map(|v| v.name.clone()).collect();
                    EvalResult {
                        value: false,
                        trace: Some(Trace {
                            bindings: Vec::new(),
                            reason: Some(Reason::NoWitness { vars }),
                        }),
                    }
                })
            }
        }
    }

    fn partition(&self, s: &Expr, parts: &[Expr], env: &Env) -> Result<EvalResult, EvalError> {
        let whole = self.set(s, env)?;
        let mut owner: HashMap<Value, usize> = HashMap::new();
        let violated = |reason| {
            Ok(EvalResult {
                value: false,
                trace: Some(Trace {
                    bindings: Vec::new(),
                    reason: Some(reason),
                }),
            })
        };
        for (i, part) in parts.iter().enumerate() {
            let items = self.set(part, env).at(|| format!("part[{}]", i + 1))?;
            for x in items.iter() {
                if let Some(&j) = owner.get(x) {
                    return violated(Reason::PartitionOverlap {
                        element: x.clone(),
                        first: j,
                        second: i + 1,
                    });
                }
                if !whole.contains(x) {
                    return violated(Reason::PartitionExtra {
                        element: x.clone(),
                        part: i + 1,
                    });
                }
                owner.insert(x.clone(), i + 1);
            }
        }
        match whole.iter().find(|x| !owner.contains_key(*x)) {
            Some(x) => violated(Reason::PartitionMissing { element: x.clone() }),
            None => Ok(EvalResult::of(true)),
        }
    }

    fn member(&self, x: &Value, s: &Val) -> Result<EvalResult, EvalError> {
        match s {
            Val::Concrete(Value::Set(items)) => Ok(EvalResult::of(items.contains(x))),
            Val::Concrete(other) => ill_typed(format!("membership test against non-set `{other}`")),
            Val::Lazy(l) => match &**l {
                Lazy::PowerSet(base) => match x {
                    Value::Set(xs) => Ok(EvalResult::of(xs.is_subset(base))),
                    other => ill_typed(format!("`{other}` tested for membership in a powerset")),
                },
                Lazy::Comprehension { expr, env } => match &**expr {
                    Expr::SetBuilder { var, pred } => self
                        .pred(pred, &env.bind(&var.name, x.clone()))
                        .at(|| format!("{{{} | ...}}", var.name)),
                    Expr::Lambda {
                        vars,
                        pred,
                        expr: body,
                    } if vars.len() == 1 && **body == Expr::Ident(vars[0].name.clone()) => {
                        let name = &vars[0].name;
                        self.pred(pred, &env.bind(name, x.clone()))
                            .at(|| format!("{{{name} . ...}}"))
                    }
                    _ => Ok(EvalResult::of(self.force(s)?.contains(x))),
                },
            },
        }
    }

    fn subset(&self, a: &Val, b: &Val) -> Result<EvalResult, EvalError> {
        if let (Val::Lazy(x), Val::Lazy(y)) = (a, b) {
            if let (Lazy::PowerSet(x), Lazy::PowerSet(y)) = (&**x, &**y) {
                return Ok(EvalResult::of(x.is_subset(y)));
            }
        }
        for x in self.force(a)?.iter() {
            let r = self.member(x, b)?;
            if !r.value {
                return Ok(r);
            }
        }
        Ok(EvalResult::of(true))
    }

    fn equal(&self, a: &Val, b: &Val) -> Result<bool, EvalError> {
        if let (Val::Concrete(x), Val::Concrete(y)) = (a, b) {
            return Ok(x == y);
        }
        if same_val(a, b, 0) {
            return Ok(true);
        }
        if let (Val::Lazy(x), Val::Lazy(y)) = (a, b) {
            if let (Lazy::PowerSet(x), Lazy::PowerSet(y)) = (&**x, &**y) {
                return Ok(x == y);
            }
        }
        Ok(self.force(a)? == self.force(b)?)
    }

    /// Materializes a set-valued result.
    fn force(&self, v: &Val) -> Result<Rc<BTreeSet<Value>>, EvalError> {
        match v {
            Val::Concrete(Value::Set(s)) => Ok(s.clone()),
            Val::Concrete(other) => ill_typed(format!("expected a set, found `{other}`")),
            Val::Lazy(l) => match &**l {
                Lazy::PowerSet(base) => {
                    if base.len() >= 64 || 1u64 << base.len() > self.cap {
                        return self.too_large(format!("powerset of a {}-element set", base.len()));
                    }
                    let items: Vec<Value> = base.iter().cloned().collect();
                    Ok(Rc::new(
                        (0..1u64 << items.len())
                            .map(|m| subset_at(&items, m))
                            .collect(),
                    ))
                }
                Lazy::Comprehension { expr, env } => {
                    let mut out = BTreeSet::new();
                    match &**expr {
                        Expr::SetBuilder { var, pred } => {
                            self.for_each_binding(std::slice::from_ref(var), env, &mut |e| {
                                if self.pred(pred, e)?.value {
                                    out.insert(
                                        e.lookup(&var.name)
                                            .and_then(|v| v.concrete().cloned())
                                            .unwrap(),
                                    );
                                }
                                Ok(true)
                            })
                            .at(|| format!("{{{} | ...}}", var.name))?;
                        }
                        Expr::Lambda {
                            vars,
                            pred,
                            expr: body,
                        } => {
                            self.for_each_binding(vars, env, &mut |e| {
                                if self.pred(pred, e)?.value {
                                    out.insert(self.value(body, e)?);
                                }
                                Ok(true)
                            })
                            .at(|| format!("{{{} . ...}}", names(vars)))?;
                        }
                        _ => unreachable!("only comprehensions are kept intensional"),
                    }
                    Ok(Rc::new(out))
                }
            },
        }
    }

    fn value(&self, e: &Expr, env: &Env) -> Result<Value, EvalError> {
        match self.expr(e, env)? {
            Val::Concrete(v) => Ok(v),
            lazy => Ok(Value::Set(self.force(&lazy)?)),
        }
    }

    fn set(&self, e: &Expr, env: &Env) -> Result<Rc<BTreeSet<Value>>, EvalError> {
        let v = self.expr(e, env)?;
        self.force(&v)
    }

    fn product(
        &self,
        a: &BTreeSet<Value>,
        b: &BTreeSet<Value>,
    ) -> Result<BTreeSet<Value>, EvalError> {
        if (a.len() as u128) * (b.len() as u128) > self.cap as u128 {
            return self.too_large(format!("product of {} x {} elements", a.len(), b.len()));
        }
        Ok(a.iter()
            .flat_map(|x| b.iter().map(move |y| Value::pair(x.clone(), y.clone())))
            .collect())
    }

    fn expr(&self, e: &Expr, env: &Env) -> Result<Val, EvalError> {
        match e {
            Expr::Ident(n) => env
                .lookup(n)
                .ok_or_else(|| EvalError::new(EvalErrorKind::Unbound(n.clone()))),
            Expr::SetLit(items) => {
                let items = items
                    .iter()
                    .map(|i| self.value(i, env))
                    .collect::<Result<BTreeSet<_>, _>>()?;
                Ok(Value::Set(Rc::new(items)).into())
            }
            Expr::Maplet(a, b) => Ok(Value::pair(self.value(a, env)?, self.value(b, env)?).into()),
            Expr::Bin(op, a, b) => {
                let (x, y) = (self.set(a, env)?, self.set(b, env)?);
                let out = match op {
                    SetOp::Union => x.union(&y).cloned().collect(),
                    SetOp::Inter => x.intersection(&y).cloned().collect(),
                    SetOp::Product => self.product(&x, &y)?,
                    SetOp::Rel => return Ok(Val::powerset(self.product(&x, &y)?)),
                    SetOp::DomRes => {
                        let mut out = BTreeSet::new();
                        for pair in y.iter() {
                            let Some((d, _)) = pair.as_pair() else {
                                return ill_typed(format!(
                                    "domain restriction of non-relation element `{pair}`"
                                ));
                            };
                            if x.contains(d) {
                                out.insert(pair.clone());
                            }
                        }
                        out
                    }
                };
                Ok(Value::Set(Rc::new(out)).into())
            }
            Expr::Pow(x) => Ok(Val::powerset((*self.set(x, env)?).clone())),
            Expr::Ran(x) => {
                let mut out = BTreeSet::new();
                for pair in self.set(x, env)?.iter() {
                    let Some((_, r)) = pair.as_pair() else {
                        return ill_typed(format!("range of non-relation element `{pair}`"));
                    };
                    out.insert(r.clone());
                }
                Ok(Value::Set(Rc::new(out)).into())
            }
            Expr::GenUnion(x) => {
                if let Some(v) = self.monotone_union(x, env)? {
                    return Ok(v.into());
                }
                let mut out = BTreeSet::new();
                for s in self.set(x, env)?.iter() {
                    let Some(items) = s.as_set() else {
                        return ill_typed(format!("generalized union over non-set element `{s}`"));
                    };
                    out.extend(items.iter().cloned());
                    if out.len() as u64 > self.cap {
                        return self.too_large("generalized union".into());
                    }
                }
                Ok(Value::Set(Rc::new(out)).into())
            }
            Expr::SetBuilder { .. } | Expr::Lambda { .. } => {
                Ok(Val::Lazy(Rc::new(Lazy::Comprehension {
                    expr: Rc::new(e.clone()),
                    env: env.clone(),
                })))
            }
        }
    }

    /// `union({r · r ∈ S | E})` with S a powerset and E monotone in r equals
    /// E evaluated at the top of S.
    fn monotone_union(&self, x: &Expr, env: &Env) -> Result<Option<Value>, EvalError> {
        let Expr::Lambda {
            vars,
            pred,
            expr: body,
        } = x
        else {
            return Ok(None);
        };
        let [var] = vars.as_slice() else {
            return Ok(None);
        };
        let Pred::In(Expr::Ident(r), s) = &**pred else {
            return Ok(None);
        };
        if *r != var.name || mentions(s, r) || !monotone(body, r) {
            return Ok(None);
        }
        let Val::Lazy(l) = self.expr(s, env)? else {
            return Ok(None);
        };
        let Lazy::PowerSet(base) = &*l else {
            return Ok(None);
        };
        self.value(body, &env.bind(r, Value::Set(base.clone())))
            .map(Some)
    }
}

fn names(vars: &[Bound]) -> String {
    vars.iter()
        .map(|v| v.name.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn bindings(vars: &[Bound], env: &Env) -> Vec<Binding> {
    vars.iter()
        .map(|v| Binding {
            name: v.name.clone(),
            value: env
                .lookup(&v.name)
                .and_then(|x| x.concrete().cloned())
                .unwrap(),
        })
        .collect()
}

const MAX_DEPTH: usize = 8;

/// Sufficient test for equality without materializing: identical values, or
/// the same comprehension over identically bound free identifiers.
fn same_val(a: &Val, b: &Val, depth: usize) -> bool {
    match (a, b) {
        (Val::Concrete(x), Val::Concrete(y)) => x == y,
        (Val::Lazy(x), Val::Lazy(y)) => {
            if Rc::ptr_eq(x, y) {
                return true;
            }
            match (&**x, &**y) {
                (Lazy::PowerSet(p), Lazy::PowerSet(q)) => p == q,
                (
                    Lazy::Comprehension { expr: e1, env: v1 },
                    Lazy::Comprehension { expr: e2, env: v2 },
                ) => {
                    depth < MAX_DEPTH
                        && e1 == e2
                        && free_identifiers(e1)
                            .iter()
                            .all(|n| match (v1.lookup(n), v2.lookup(n)) {
                                (Some(p), Some(q)) => same_val(&p, &q, depth + 1),
                                (None, None) => true,
                                _ => false,
                            })
                }
                _ => false,
            }
        }
        _ => false,
    }
}
