//! Event-B context AST.

mod check;
mod print;

pub use check::{check_context, free_identifiers};
pub use print::{print_context, print_expr, print_pred, PrintError, Style};

/// Type annotation on bound variables. Only used for evaluation; never
/// printed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Carrier(String),
    Pow(Box<Type>),
    Prod(Box<Type>, Box<Type>),
}

impl Type {
    pub fn carrier(name: &str) -> Type {
        Type::Carrier(name.to_string())
    }

    pub fn pow(t: Type) -> Type {
        Type::Pow(Box::new(t))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    /// `ℙ(a × b)`
    pub fn rel(a: Type, b: Type) -> Type {
        Type::pow(Type::prod(a, b))
    }

    pub(crate) fn carriers<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Type::Carrier(c) => out.push(c),
            Type::Pow(t) => t.carriers(out),
            Type::Prod(a, b) => {
                a.carriers(out);
                b.carriers(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bound {
    pub name: String,
    pub ty: Type,
}

impl Bound {
    pub fn new(name: &str, ty: Type) -> Self {
        Bound {
            name: name.to_string(),
            ty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetOp {
    Union,
    Inter,
    /// `S ↔ T`
    Rel,
    /// `S × T`
    Product,
    /// `S ◁ r`
    DomRes,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Ident(String),
    SetLit(Vec<Expr>),
    Maplet(Box<Expr>, Box<Expr>),
    Bin(SetOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>),
    Ran(Box<Expr>),
    /// Generalized union `union(E)`.
    GenUnion(Box<Expr>),
    /// `{x | P}`
    SetBuilder {
        var: Bound,
        pred: Box<Pred>,
    },
    /// `{x · P | E}`
    Lambda {
        vars: Vec<Bound>,
        pred: Box<Pred>,
        expr: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pred {
    In(Expr, Expr),
    Subset(Expr, Expr),
    Eq(Expr, Expr),
    Partition(Expr, Vec<Expr>),
    And(Vec<Pred>),
    Or(Vec<Pred>),
    Implies(Box<Pred>, Box<Pred>),
    Iff(Box<Pred>, Box<Pred>),
    Forall(Vec<Bound>, Box<Pred>),
    Exists(Vec<Bound>, Box<Pred>),
}

impl Expr {
    pub fn id(name: impl AsRef<str>) -> Expr {
        Expr::Ident(name.as_ref().to_string())
    }

    pub fn set<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        Expr::SetLit(items.into_iter().collect())
    }

    pub fn singleton(e: Expr) -> Expr {
        Expr::SetLit(vec![e])
    }

    pub fn maplet(self, rhs: Expr) -> Expr {
        Expr::Maplet(Box::new(self), Box::new(rhs))
    }

    pub fn bin(op: SetOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn union(self, rhs: Expr) -> Expr {
        Expr::bin(SetOp::Union, self, rhs)
    }

    pub fn rel(self, rhs: Expr) -> Expr {
        Expr::bin(SetOp::Rel, self, rhs)
    }

    pub fn product(self, rhs: Expr) -> Expr {
        Expr::bin(SetOp::Product, self, rhs)
    }

    pub fn dom_res(self, rhs: Expr) -> Expr {
        Expr::bin(SetOp::DomRes, self, rhs)
    }

    pub fn pow(e: Expr) -> Expr {
        Expr::Pow(Box::new(e))
    }

    pub fn ran(e: Expr) -> Expr {
        Expr::Ran(Box::new(e))
    }

    pub fn gen_union(e: Expr) -> Expr {
        Expr::GenUnion(Box::new(e))
    }

    pub fn set_builder(var: Bound, pred: Pred) -> Expr {
        Expr::SetBuilder {
            var,
            pred: Box::new(pred),
        }
    }

    pub fn lambda(vars: Vec<Bound>, pred: Pred, expr: Expr) -> Expr {
        Expr::Lambda {
            vars,
            pred: Box::new(pred),
            expr: Box::new(expr),
        }
    }

    /// Left-associated union of two or more operands.
    pub fn union_all(items: Vec<Expr>) -> Expr {
        let mut it = items.into_iter();
        let first = it.next().expect("union of nothing");
        it.fold(first, Expr::union)
    }

    pub fn mem(self, set: Expr) -> Pred {
        Pred::In(self, set)
    }

    pub fn subset(self, set: Expr) -> Pred {
        Pred::Subset(self, set)
    }

    pub fn equals(self, rhs: Expr) -> Pred {
        Pred::Eq(self, rhs)
    }
}

impl Pred {
    pub fn implies(self, rhs: Pred) -> Pred {
        Pred::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Pred) -> Pred {
        Pred::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn forall(vars: Vec<Bound>, body: Pred) -> Pred {
        Pred::Forall(vars, Box::new(body))
    }

    pub fn exists(vars: Vec<Bound>, body: Pred) -> Pred {
        Pred::Exists(vars, Box::new(body))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labelled {
    pub label: String,
    pub pred: Pred,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventBContext {
    pub name: String,
    pub extends: Option<String>,
    pub sets: Vec<String>,
    pub constants: Vec<String>,
    pub axioms: Vec<Labelled>,
    pub theorems: Vec<Labelled>,
}

impl EventBContext {
    pub fn new(name: impl Into<String>) -> Self {
        EventBContext {
            name: name.into(),
            extends: None,
            sets: Vec::new(),
            constants: Vec::new(),
            axioms: Vec::new(),
            theorems: Vec::new(),
        }
    }

    /// Appends an axiom labelled `axm<N>`.
    pub fn axiom(&mut self, pred: Pred) -> &mut Self {
        let label = format!("axm{}", self.axioms.len() + 1);
        self.axioms.push(Labelled { label, pred });
        self
    }

    /// Appends a theorem labelled `thm<N>`.
    pub fn theorem(&mut self, pred: Pred) -> &mut Self {
        let label = format!("thm{}", self.theorems.len() + 1);
        self.theorems.push(Labelled { label, pred });
        self
    }

    pub fn axiom_by_label(&self, label: &str) -> Option<&Pred> {
        self.axioms
            .iter()
            .chain(&self.theorems)
            .find(|l| l.label == label)
            .map(|l| &l.pred)
    }

    /// Own sets and constants, plus the parent's when given.
    pub fn declared<'a>(&'a self, parent: Option<&'a EventBContext>) -> Vec<&'a str> {
        let mut out: Vec<&str> = Vec::new();
        if let Some(p) = parent {
            out.extend(p.sets.iter().chain(&p.constants).map(String::as_str));
        }
        out.extend(self.sets.iter().chain(&self.constants).map(String::as_str));
        out
    }
}
