use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::eval::{EvalError, Evaluator};
use super::value::{Val, Value};
use crate::deep::{
    self, CLASS, EQ_LIT, HAS_INSTANCES_LIT, INSTANCE, IS_A_LIT, PROPERTY, UNION_OF_LIT, VALUES,
};
use crate::eventb::{EventBContext, Expr, Pred};
use crate::pivot::PivotOntology;
use crate::shallow::THING;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Shallow,
    Deep,
}

/// Carrier sets with their ordered domains, and constant values.
#[derive(Debug, Clone, Default)]
pub struct FiniteInterpretation {
    pub carrier_domains: BTreeMap<String, Vec<Value>>,
    pub constant_values: BTreeMap<String, Val>,
}

impl FiniteInterpretation {
    pub fn constant(&self, name: &str) -> Option<&Val> {
        self.constant_values.get(name)
    }
}

/// Instance atoms (declared, then synthetic) and the closed membership of
/// each class, as indices into the atom list.
fn instance_model(p: &PivotOntology, synthetic: bool) -> (Vec<Value>, Vec<BTreeSet<usize>>) {
    let declared = p.all_instances();
    let mut atoms: Vec<Value> = declared.iter().map(|i| Value::atom(i.as_str())).collect();
    let mut seed: Vec<BTreeSet<usize>> = p
        .classes
        .iter()
        .map(|c| {
            p.instances(c)
                .iter()
                .map(|i| declared.iter().position(|x| x == i).unwrap())
                .collect()
        })
        .collect();
    if synthetic {
        for (k, c) in p.classes.iter().enumerate() {
            let leaf = !p.is_a.iter().any(|(_, q)| q == c) && p.union_of(c).is_none();
            if leaf && seed[k].is_empty() {
                seed[k].insert(atoms.len());
                atoms.push(Value::atom(&format!("@{c}")));
            }
        }
    }
    (atoms, p.close_instances(seed))
}

/// Binds constants defined by an axiom `c = E` (in order) that the
/// interpretation leaves unbound, to E's value. Comprehensions stay
/// intensional.
pub fn bind_definitions(
    ctx: &EventBContext,
    interp: &mut FiniteInterpretation,
) -> Result<(), EvalError> {
    let mut ev = Evaluator::new(interp);
    for l in &ctx.axioms {
        if let Pred::Eq(Expr::Ident(c), rhs) = &l.pred {
            if ctx.constants.contains(c) && !ev.is_bound(c) {
                let v = ev.eval_expr(rhs)?;
                ev.bind_constant(c, v.clone());
                interp.constant_values.insert(c.clone(), v);
            }
        }
    }
    Ok(())
}

fn class_components(p: &PivotOntology) -> Vec<usize> {
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    let mut parent: Vec<usize> = (0..p.classes.len()).collect();
    for (a, b) in &p.equiv {
        let (ra, rb) = (
            find(&mut parent, p.class_index(a).unwrap()),
            find(&mut parent, p.class_index(b).unwrap()),
        );
        parent[ra.max(rb)] = ra.min(rb);
    }
    (0..p.classes.len()).map(|i| find(&mut parent, i)).collect()
}

/// Builds the interpretation the checker evaluates a translated ontology
/// against.
///
/// Leaf classes (no subclass, not a union, no declared individual) get one
/// synthetic instance `@C`; in the deep encoding only when the ontology
/// declares no individuals at all. Instance sets are closed along is_a,
/// equivalence and unions. Shallow: `Thing` holds every instance and each
/// class denotes its instance set. Deep: classes and instances are atoms of
/// CLASS and INSTANCE, the isA/eQ/unionOf/hasInstances constants are computed
/// from the pivot, and the generic context's defined constants are bound from
/// their defining axioms.
pub fn derive_interpretation(p: &PivotOntology, encoding: Encoding) -> FiniteInterpretation {
    let mut interp = FiniteInterpretation::default();
    match encoding {
        Encoding::Shallow => {
            let (atoms, closed) = instance_model(p, true);
            for (c, members) in p.classes.iter().zip(&closed) {
                let v = Value::set(members.iter().map(|&i| atoms[i].clone()));
                interp.constant_values.insert(c.to_string(), v.into());
            }
            for i in p.all_instances() {
                interp
                    .constant_values
                    .insert(i.to_string(), Value::atom(i.as_str()).into());
            }
            interp.carrier_domains.insert(THING.to_string(), atoms);
        }
        Encoding::Deep => {
            let declared = p.all_instances();
            let (atoms, closed) = instance_model(p, declared.is_empty());
            let class_atoms: Vec<Value> =
                p.classes.iter().map(|c| Value::atom(c.as_str())).collect();
            for (c, a) in p.classes.iter().zip(&class_atoms) {
                interp
                    .constant_values
                    .insert(c.to_string(), a.clone().into());
            }
            for i in &declared {
                interp
                    .constant_values
                    .insert(i.to_string(), Value::atom(i.as_str()).into());
            }
            let atom = |c| Value::atom(p.classes[p.class_index(c).unwrap()].as_str());
            let is_a = Value::set(p.is_a.iter().map(|(c, q)| Value::pair(atom(c), atom(q))));
            let comp = class_components(p);
            let eq = Value::set((0..p.classes.len()).flat_map(|i| {
                let comp = &comp;
                let class_atoms = &class_atoms;
                (0..p.classes.len())
                    .filter(move |&j| comp[i] == comp[j])
                    .map(move |j| Value::pair(class_atoms[i].clone(), class_atoms[j].clone()))
            }));
            let union_of = Value::set(p.unions.iter().map(|u| {
                let first = Value::set([atom(&u.members[0])]);
                let rest = Value::set(u.members[1..].iter().map(atom));
                Value::pair(Value::pair(first, rest), atom(&u.target))
            }));
            interp.constant_values.insert(IS_A_LIT.into(), is_a.into());
            interp.constant_values.insert(EQ_LIT.into(), eq.into());
            interp
                .constant_values
                .insert(UNION_OF_LIT.into(), union_of.into());
            if !declared.is_empty() {
                let mut has = BTreeSet::new();
                for (c, members) in class_atoms.iter().zip(&closed) {
                    has.extend(
                        members
                            .iter()
                            .map(|&i| Value::pair(c.clone(), atoms[i].clone())),
                    );
                }
                let has = Value::set(has);
                interp
                    .constant_values
                    .insert(HAS_INSTANCES_LIT.into(), has.into());
            }
            interp.carrier_domains.insert(CLASS.into(), class_atoms);
            interp.carrier_domains.insert(INSTANCE.into(), atoms);
            interp.carrier_domains.insert(PROPERTY.into(), Vec::new());
            interp.carrier_domains.insert(VALUES.into(), Vec::new());
            bind_definitions(&deep::emit_deep_generic(), &mut interp)
                .expect("generic definitions evaluate over any derived interpretation");
        }
    }
    interp
}
