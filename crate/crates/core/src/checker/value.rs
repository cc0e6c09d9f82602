use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use serde::{Serialize, Serializer};

use super::eval::Env;
use crate::eventb::Expr;

/// A fully materialized value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Atom(Rc<str>),
    Pair(Rc<Value>, Rc<Value>),
    Set(Rc<BTreeSet<Value>>),
}

impl Value {
    pub fn atom(name: &str) -> Value {
        Value::Atom(name.into())
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn set<I: IntoIterator<Item = Value>>(items: I) -> Value {
        Value::Set(Rc::new(items.into_iter().collect()))
    }

    pub fn empty() -> Value {
        Value::Set(Rc::new(BTreeSet::new()))
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => f.write_str(a),
            Value::Pair(a, b) => match &**b {
                Value::Pair(..) => write!(f, "{a} |-> ({b})"),
                _ => write!(f, "{a} |-> {b}"),
            },
            Value::Set(items) => {
                f.write_str("{")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A set kept in intensional form until something forces it.
#[derive(Debug, Clone)]
pub enum Lazy {
    /// `ℙ(base)`; relation spaces `S ↔ T` are `ℙ(S × T)`.
    PowerSet(Rc<BTreeSet<Value>>),
    /// A set-builder or lambda comprehension closed over its environment.
    Comprehension { expr: Rc<Expr>, env: Env },
}

/// Result of evaluating an expression: either a concrete value or an
/// intensional set.
#[derive(Debug, Clone)]
pub enum Val {
    Concrete(Value),
    Lazy(Rc<Lazy>),
}

impl From<Value> for Val {
    fn from(v: Value) -> Self {
        Val::Concrete(v)
    }
}

impl Val {
    pub fn powerset(base: BTreeSet<Value>) -> Val {
        Val::Lazy(Rc::new(Lazy::PowerSet(Rc::new(base))))
    }

    pub fn concrete(&self) -> Option<&Value> {
        match self {
            Val::Concrete(v) => Some(v),
            Val::Lazy(_) => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Concrete(v) => write!(f, "{v}"),
            Val::Lazy(l) => match &**l {
                Lazy::PowerSet(base) => write!(f, "POW({})", Value::Set(base.clone())),
                Lazy::Comprehension { expr, .. } => {
                    write!(f, "{}", crate::eventb::print_expr(expr, Default::default()))
                }
            },
        }
    }
}
