//! Shallow encoding: ontology classes become subsets of a single carrier set
//! `Thing`.

use crate::eventb::{EventBContext, Expr};
use crate::pivot::PivotOntology;

pub const THING: &str = "Thing";

/// Emits the shallow context.
///
/// Axioms are grouped per class in pivot order: root typing `C ⊆ Thing` (only
/// for classes with neither a declared parent nor a union definition, which
/// already types them), `C ⊆ P` per parent, `C = D` per
/// equivalence first declared by C, and `C = (M1 ∪ M2 ∪ …)` when C is a union.
/// Instance memberships `i ∈ C` follow after all classes.
pub fn emit_shallow(p: &PivotOntology, name: &str) -> EventBContext {
    let mut ctx = EventBContext::new(name);
    ctx.sets.push(THING.to_string());
    ctx.constants
        .extend(p.classes.iter().map(|c| c.to_string()));
    ctx.constants
        .extend(p.all_instances().iter().map(|i| i.to_string()));

    let equiv = p.equiv_pairs();
    for class in &p.classes {
        let parents: Vec<_> = p
            .is_a
            .iter()
            .filter(|(c, _)| c == class)
            .map(|(_, q)| q)
            .collect();
        if parents.is_empty() && p.union_of(class).is_none() {
            ctx.axiom(Expr::id(class).subset(Expr::id(THING)));
        }
        for parent in parents {
            ctx.axiom(Expr::id(class).subset(Expr::id(parent)));
        }
        for (a, b) in equiv.iter().filter(|(a, _)| a == class) {
            ctx.axiom(Expr::id(a).equals(Expr::id(b)));
        }
        if let Some(u) = p.union_of(class) {
            // union is commutative; operands are listed in identifier order
            let mut members: Vec<&str> = u.members.iter().map(|m| m.as_str()).collect();
            members.sort_unstable();
            let rhs = Expr::union_all(members.into_iter().map(Expr::id).collect());
            ctx.axiom(Expr::id(class).equals(rhs));
        }
    }
    for row in &p.instances_of {
        for inst in &row.instances {
            ctx.axiom(Expr::id(inst).mem(Expr::id(&row.class)));
        }
    }
    ctx
}
