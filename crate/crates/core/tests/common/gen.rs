//! Random well-typed predicates over a small fixed signature:
//! carrier `S`, constants `A`, `B` (subsets of S), `Q` (a relation on S) and
//! `a` (an element of S).

use ontoforge::checker::{FiniteInterpretation, Value};
use ontoforge::eventb::{Bound, Expr, Pred, Type};
use rand::seq::SliceRandom;
use rand::Rng;

use super::reference::{RefModel, RV};

pub struct Case {
    pub pred: Pred,
    pub interp: FiniteInterpretation,
    pub model: RefModel,
}

fn to_value(v: &RV) -> Value {
    match v {
        RV::A(a) => Value::atom(a),
        RV::P(a, b) => Value::pair(to_value(a), to_value(b)),
        RV::S(items) => Value::set(items.iter().map(to_value)),
    }
}

fn pick_subset<R: Rng>(rng: &mut R, items: &[RV]) -> RV {
    RV::S(
        items
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect(),
    )
}

fn pair(a: &RV, b: &RV) -> RV {
    RV::P(Box::new(a.clone()), Box::new(b.clone()))
}

pub fn random_case<R: Rng>(rng: &mut R) -> Case {
    let n = rng.gen_range(1..=3);
    let atoms: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let s: Vec<RV> = atoms.iter().map(|a| RV::A(a.clone())).collect();
    let pairs: Vec<RV> = s
        .iter()
        .flat_map(|x| s.iter().map(move |y| pair(x, y)))
        .collect();

    let mut model = RefModel::default();
    model.carriers.insert("S".into(), atoms.clone());
    model.consts.insert("A".into(), pick_subset(rng, &s));
    model.consts.insert("B".into(), pick_subset(rng, &s));
    model.consts.insert("Q".into(), pick_subset(rng, &pairs));
    model
        .consts
        .insert("a".into(), s.choose(rng).unwrap().clone());

    let mut g = Gen {
        rng,
        atoms: Vec::new(),
        sets: Vec::new(),
        fresh: 0,
    };
    let pred = g.pred(3);

    let interp = FiniteInterpretation {
        carrier_domains: [(
            "S".to_string(),
            atoms.iter().map(|a| Value::atom(a)).collect(),
        )]
        .into(),
        constant_values: model
            .consts
            .iter()
            .map(|(k, v)| (k.clone(), to_value(v).into()))
            .collect(),
    };
    Case {
        pred,
        interp,
        model,
    }
}

struct Gen<'r, R> {
    rng: &'r mut R,
    atoms: Vec<String>,
    sets: Vec<String>,
    fresh: usize,
}

fn s_ty() -> Type {
    Type::carrier("S")
}

impl<R: Rng> Gen<'_, R> {
    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn atom(&mut self) -> Expr {
        if !self.atoms.is_empty() && self.rng.gen_bool(0.7) {
            Expr::id(self.atoms.choose(self.rng).unwrap())
        } else {
            Expr::id("a")
        }
    }

    fn scoped<T>(&mut self, var: &str, set_valued: bool, f: impl FnOnce(&mut Self) -> T) -> T {
        let stack = if set_valued {
            &mut self.sets
        } else {
            &mut self.atoms
        };
        stack.push(var.to_string());
        let out = f(self);
        let stack = if set_valued {
            &mut self.sets
        } else {
            &mut self.atoms
        };
        stack.pop();
        out
    }

    fn rel(&mut self, depth: u32) -> Expr {
        match self.rng.gen_range(0..if depth == 0 { 1 } else { 3 }) {
            0 => Expr::id("Q"),
            1 => self.set(depth - 1).product(self.set(depth - 1)),
            _ => self.set(depth - 1).dom_res(self.rel(depth - 1)),
        }
    }

    fn set(&mut self, depth: u32) -> Expr {
        let leaves = 4;
        let choices = if depth == 0 { leaves } else { leaves + 8 };
        match self.rng.gen_range(0..choices) {
            0 => Expr::id(["A", "B", "S"].choose(self.rng).unwrap()),
            1 if !self.sets.is_empty() => Expr::id(self.sets.choose(self.rng).unwrap()),
            1 => Expr::id("A"),
            2 => {
                let k = self.rng.gen_range(0..=2);
                Expr::set((0..k).map(|_| self.atom()).collect::<Vec<_>>())
            }
            3 => Expr::ran(Expr::id("Q")),
            4 => self.set(depth - 1).union(self.set(depth - 1)),
            5 => Expr::bin(
                ontoforge::eventb::SetOp::Inter,
                self.set(depth - 1),
                self.set(depth - 1),
            ),
            6 => Expr::ran(self.rel(depth - 1)),
            7 => Expr::ran(Expr::singleton(self.atom()).dom_res(self.rel(depth - 1))),
            8 => {
                let z = self.name("z");
                let pred = self.scoped(&z, false, |g| g.pred(depth - 1));
                Expr::set_builder(Bound::new(&z, s_ty()), pred)
            }
            9 => {
                // generalized union over a powerset; body may or may not be monotone
                let r = self.name("r");
                let dom = self.set(depth - 1);
                let body = self.scoped(&r, true, |g| g.set(depth - 1));
                Expr::gen_union(Expr::lambda(
                    vec![Bound::new(&r, Type::pow(s_ty()))],
                    Expr::id(&r).mem(Expr::pow(dom)),
                    body,
                ))
            }
            10 => {
                let z = self.name("z");
                let pred = self.scoped(&z, false, |g| g.pred(depth - 1));
                Expr::lambda(vec![Bound::new(&z, s_ty())], pred, Expr::id(&z))
            }
            _ => {
                let r = self.name("r");
                let pred = self.scoped(&r, true, |g| g.pred(depth - 1));
                Expr::gen_union(Expr::set_builder(Bound::new(&r, Type::pow(s_ty())), pred))
            }
        }
    }

    fn pred(&mut self, depth: u32) -> Pred {
        let leaves = 9;
        let choices = if depth == 0 { leaves } else { leaves + 7 };
        let d = depth.saturating_sub(1);
        match self.rng.gen_range(0..choices) {
            0 => self.atom().mem(self.set(d)),
            1 => self.set(d).subset(self.set(d)),
            2 => self.set(d).equals(self.set(d)),
            3 => Expr::pow(self.set(d)).equals(Expr::pow(self.set(d))),
            4 => self.set(d).mem(Expr::pow(self.set(d))),
            5 => self.rel(d).mem(self.set(d).rel(self.set(d))),
            6 => self.atom().maplet(self.atom()).mem(self.rel(d)),
            7 => {
                let k = self.rng.gen_range(0..=3);
                Pred::Partition(self.set(d), (0..k).map(|_| self.set(d)).collect())
            }
            8 => Expr::pow(self.set(d)).subset(Expr::pow(self.set(d))),
            9 => Pred::And(
                (0..self.rng.gen_range(2..=3))
                    .map(|_| self.pred(d))
                    .collect(),
            ),
            10 => Pred::Or((0..2).map(|_| self.pred(d)).collect()),
            11 => self.pred(d).implies(self.pred(d)),
            12 => self.pred(d).iff(self.pred(d)),
            13 | 14 => {
                let set_valued = self.rng.gen_bool(0.4);
                let v = self.name(if set_valued { "r" } else { "x" });
                let ty = if set_valued {
                    Type::pow(s_ty())
                } else {
                    s_ty()
                };
                let body = self.scoped(&v, set_valued, |g| g.pred(d));
                if self.rng.gen_bool(0.5) {
                    Pred::forall(vec![Bound::new(&v, ty)], body)
                } else {
                    Pred::exists(vec![Bound::new(&v, ty)], body)
                }
            }
            _ => {
                // comprehension equality, often between identical comprehensions
                let z = self.name("z");
                let pred = self.scoped(&z, false, |g| g.pred(d));
                let lhs = Expr::set_builder(Bound::new(&z, s_ty()), pred.clone());
                let rhs = if self.rng.gen_bool(0.5) {
                    lhs.clone()
                } else {
                    let pred = self.scoped(&z, false, |g| g.pred(d));
                    Expr::set_builder(Bound::new(&z, s_ty()), pred)
                };
                lhs.equals(rhs)
            }
        }
    }
}
