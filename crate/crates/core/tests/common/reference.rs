//! Naive reference evaluator: every set is built eagerly, quantifiers and
//! comprehensions enumerate their full type domain. Shares nothing with the
//! library evaluator beyond the AST.

use std::collections::{BTreeMap, BTreeSet};

use ontoforge::eventb::{Bound, Expr, Pred, SetOp, Type};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RV {
    A(String),
    P(Box<RV>, Box<RV>),
    S(BTreeSet<RV>),
}

impl RV {
    fn set(&self) -> &BTreeSet<RV> {
        match self {
            RV::S(s) => s,
            other => panic!("expected a set, got {other:?}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RefModel {
    pub carriers: BTreeMap<String, Vec<String>>,
    pub consts: BTreeMap<String, RV>,
}

type Env = BTreeMap<String, RV>;

fn subsets(items: &[RV]) -> Vec<RV> {
    let mut out = vec![BTreeSet::new()];
    for it in items {
        let with: Vec<BTreeSet<RV>> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.insert(it.clone());
                s
            })
            .collect();
        out.extend(with);
    }
    out.into_iter().map(RV::S).collect()
}

impl RefModel {
    fn dom(&self, ty: &Type) -> Vec<RV> {
        match ty {
            Type::Carrier(c) => self.carriers[c].iter().map(|a| RV::A(a.clone())).collect(),
            Type::Pow(t) => subsets(&self.dom(t)),
            Type::Prod(a, b) => {
                let (a, b) = (self.dom(a), self.dom(b));
                a.iter()
                    .flat_map(|x| {
                        b.iter()
                            .map(move |y| RV::P(Box::new(x.clone()), Box::new(y.clone())))
                    })
                    .collect()
            }
        }
    }

    fn base_env(&self) -> Env {
        let mut env: Env = self.consts.clone();
        for (c, atoms) in &self.carriers {
            env.insert(
                c.clone(),
                RV::S(atoms.iter().map(|a| RV::A(a.clone())).collect()),
            );
        }
        env
    }

    pub fn holds(&self, p: &Pred) -> bool {
        self.pred(p, &self.base_env())
    }

    pub fn value(&self, e: &Expr) -> RV {
        self.expr(e, &self.base_env())
    }

    fn bindings(&self, vars: &[Bound], env: &Env) -> Vec<Env> {
        let mut envs = vec![env.clone()];
        for v in vars {
            let dom = self.dom(&v.ty);
            envs = envs
                .into_iter()
                .flat_map(|e| {
                    dom.iter().map(move |x| {
                        let mut e = e.clone();
                        e.insert(v.name.clone(), x.clone());
                        e
                    })
                })
                .collect();
        }
        envs
    }

    fn pred(&self, p: &Pred, env: &Env) -> bool {
        match p {
            Pred::In(a, s) => self.expr(s, env).set().contains(&self.expr(a, env)),
            Pred::Subset(a, b) => self.expr(a, env).set().is_subset(self.expr(b, env).set()),
            Pred::Eq(a, b) => self.expr(a, env) == self.expr(b, env),
            Pred::Partition(s, parts) => {
                let whole = self.expr(s, env).set().clone();
                let parts: Vec<BTreeSet<RV>> = parts
                    .iter()
                    .map(|x| self.expr(x, env).set().clone())
                    .collect();
                let disjoint = (0..parts.len())
                    .all(|i| (i + 1..parts.len()).all(|j| parts[i].is_disjoint(&parts[j])));
                let union: BTreeSet<RV> = parts.iter().flatten().cloned().collect();
                disjoint && union == whole
            }
            Pred::And(items) => items.iter().all(|x| self.pred(x, env)),
            Pred::Or(items) => items.iter().any(|x| self.pred(x, env)),
            Pred::Implies(a, b) => !self.pred(a, env) || self.pred(b, env),
            Pred::Iff(a, b) => self.pred(a, env) == self.pred(b, env),
            Pred::Forall(vars, body) => self.bindings(vars, env).iter().all(|e| self.pred(body, e)),
            Pred::Exists(vars, body) => self.bindings(vars, env).iter().any(|e| self.pred(body, e)),
        }
    }

    fn expr(&self, e: &Expr, env: &Env) -> RV {
        match e {
            Expr::Ident(n) => env.get(n).unwrap_or_else(|| panic!("unbound {n}")).clone(),
            Expr::SetLit(items) => RV::S(items.iter().map(|x| self.expr(x, env)).collect()),
            Expr::Maplet(a, b) => RV::P(Box::new(self.expr(a, env)), Box::new(self.expr(b, env))),
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.expr(a, env), self.expr(b, env));
                let (a, b) = (a.set(), b.set());
                let product = || -> Vec<RV> {
                    a.iter()
                        .flat_map(|x| {
                            b.iter()
                                .map(move |y| RV::P(Box::new(x.clone()), Box::new(y.clone())))
                        })
                        .collect()
                };
                match op {
                    SetOp::Union => RV::S(a | b),
                    SetOp::Inter => RV::S(a & b),
                    SetOp::Product => RV::S(product().into_iter().collect()),
                    SetOp::Rel => RV::S(subsets(&product()).into_iter().collect()),
                    SetOp::DomRes => RV::S(
                        b.iter()
                            .filter(|p| matches!(p, RV::P(d, _) if a.contains(d)))
                            .cloned()
                            .collect(),
                    ),
                }
            }
            Expr::Pow(x) => {
                let items: Vec<RV> = self.expr(x, env).set().iter().cloned().collect();
                RV::S(subsets(&items).into_iter().collect())
            }
            Expr::Ran(x) => RV::S(
                self.expr(x, env)
                    .set()
                    .iter()
                    .map(|p| match p {
                        RV::P(_, r) => (**r).clone(),
                        other => panic!("ran of {other:?}"),
                    })
                    .collect(),
            ),
            Expr::GenUnion(x) => RV::S(
                self.expr(x, env)
                    .set()
                    .iter()
                    .flat_map(|s| s.set().iter().cloned())
                    .collect(),
            ),
            Expr::SetBuilder { var, pred } => RV::S(
                self.bindings(std::slice::from_ref(var), env)
                    .into_iter()
                    .filter(|e| self.pred(pred, e))
                    .map(|e| e[&var.name].clone())
                    .collect(),
            ),
            Expr::Lambda { vars, pred, expr } => RV::S(
                self.bindings(vars, env)
                    .into_iter()
                    .filter(|e| self.pred(pred, e))
                    .map(|e| self.expr(expr, &e))
                    .collect(),
            ),
        }
    }
}
