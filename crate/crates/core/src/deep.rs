//! Deep encoding: a fixed generic context describing the ontology language
//! (`Ontology_Model`) and a per-ontology context that instantiates it.

use crate::diag::{Code, Diagnostic, Location};
use crate::eventb::{Bound, EventBContext, Expr, Pred, Type};
use crate::pivot::PivotOntology;

pub const GENERIC_NAME: &str = "Ontology_Model";

pub const CLASS: &str = "CLASS";
pub const PROPERTY: &str = "PROPERTY";
pub const INSTANCE: &str = "INSTANCE";
pub const VALUES: &str = "VALUES";
pub const HAS_INSTANCES: &str = "HAS_INSTANCES";
pub const IS_A: &str = "IS_A";
pub const EQUIVALENCE: &str = "EQUIVALENCE";
pub const UNION_OF: &str = "UNION_OF";

pub const IS_A_LIT: &str = "isA";
pub const EQ_LIT: &str = "eQ";
pub const UNION_OF_LIT: &str = "unionOf";
pub const HAS_INSTANCES_LIT: &str = "hasInstances";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeepEncodingPair {
    pub generic: EventBContext,
    pub specific: EventBContext,
}

fn id(s: &str) -> Expr {
    Expr::id(s)
}

fn and(items: Vec<Pred>) -> Pred {
    Pred::And(items)
}

/// The generic ontology-model context. Independent of any ontology.
pub fn emit_deep_generic() -> EventBContext {
    let class = Type::carrier(CLASS);
    let instance = Type::carrier(INSTANCE);
    let class_rel = Type::rel(class.clone(), class.clone());
    let has_rel = Type::rel(class.clone(), instance.clone());

    let mut ctx = EventBContext::new(GENERIC_NAME);
    ctx.sets = [CLASS, PROPERTY, INSTANCE, VALUES]
        .map(String::from)
        .to_vec();
    ctx.constants = [HAS_INSTANCES, IS_A, EQUIVALENCE, UNION_OF]
        .map(String::from)
        .to_vec();

    ctx.axiom(id(HAS_INSTANCES).equals(id(CLASS).rel(id(INSTANCE))));

    // instances of x, gathered over every relation in HAS_INSTANCES
    let instances_of = |x: &str| {
        Expr::gen_union(Expr::lambda(
            vec![Bound::new("r", has_rel.clone())],
            id("r").mem(id(HAS_INSTANCES)),
            Expr::ran(Expr::singleton(id(x)).dom_res(id("r"))),
        ))
    };
    let is_a_body = and(vec![
        id("x").mem(id(CLASS)),
        id("y").mem(id(CLASS)),
        id("x").maplet(id("y")).mem(id("IsA")),
    ])
    .iff(instances_of("x").subset(instances_of("y")));
    ctx.axiom(id(IS_A).equals(Expr::set_builder(
        Bound::new("IsA", class_rel.clone()),
        and(vec![
            id("IsA").mem(id(CLASS).rel(id(CLASS))),
            Pred::forall(
                vec![
                    Bound::new("x", class.clone()),
                    Bound::new("y", class.clone()),
                ],
                is_a_body,
            ),
        ]),
    )));

    let xyz = |names: &[&str]| {
        names
            .iter()
            .map(|n| Bound::new(n, class.clone()))
            .collect::<Vec<_>>()
    };
    let reflexive = Pred::forall(
        xyz(&["x"]),
        id("x")
            .mem(id(CLASS))
            .implies(id("x").maplet(id("x")).mem(id("EQo"))),
    );
    let symmetric = Pred::forall(
        xyz(&["x", "y"]),
        and(vec![
            id("x").mem(id(CLASS)),
            id("y").mem(id(CLASS)),
            id("x").maplet(id("y")).mem(id("EQo")),
        ])
        .implies(id("y").maplet(id("x")).mem(id("EQo"))),
    );
    let transitive = Pred::forall(
        xyz(&["x", "y", "z"]),
        and(vec![
            id("x").mem(id(CLASS)),
            id("y").mem(id(CLASS)),
            id("z").mem(id(CLASS)),
            id("x").maplet(id("y")).mem(id("EQo")),
            id("y").maplet(id("z")).mem(id("EQo")),
        ])
        .implies(id("x").maplet(id("z")).mem(id("EQo"))),
    );
    ctx.axiom(id(EQUIVALENCE).equals(Expr::set_builder(
        Bound::new("EQo", class_rel),
        and(vec![
            id("EQo").mem(id(CLASS).rel(id(CLASS))),
            reflexive,
            symmetric,
            transitive,
        ]),
    )));

    let class_set = Type::pow(class.clone());
    let union_sig = Type::rel(
        Type::prod(class_set.clone(), class_set.clone()),
        class.clone(),
    );
    let some_member_has = Pred::Or(vec![
        id("n").maplet(id("instance")).mem(id("hasInstance")),
        id("m").maplet(id("instance")).mem(id("hasInstance")),
    ]);
    let covers = Pred::forall(
        vec![
            Bound::new("n", class.clone()),
            Bound::new("m", class.clone()),
        ],
        and(vec![
            id("n").mem(id("x")),
            id("m").mem(id("y")),
            some_member_has,
        ])
        .implies(id("z").maplet(id("instance")).mem(id("hasInstance"))),
    );
    let per_instance = Pred::forall(
        vec![Bound::new("instance", instance.clone())],
        id("instance").mem(id(INSTANCE)).implies(Pred::exists(
            vec![Bound::new("hasInstance", has_rel)],
            id("hasInstance").mem(id(HAS_INSTANCES)).implies(covers),
        )),
    );
    let union_body = Pred::forall(
        vec![
            Bound::new("x", class_set.clone()),
            Bound::new("y", class_set),
            Bound::new("z", class),
        ],
        and(vec![
            id("x").mem(Expr::pow(id(CLASS))),
            id("y").mem(Expr::pow(id(CLASS))),
            id("z").mem(id(CLASS)),
            id("x").maplet(id("y")).maplet(id("z")).mem(id("unionOf")),
        ])
        .implies(per_instance),
    );
    ctx.axiom(id(UNION_OF).equals(Expr::set_builder(
        Bound::new("unionOf", union_sig),
        and(vec![
            id("unionOf").mem(Expr::pow(id(CLASS)).product(Expr::pow(id(CLASS))).rel(id(CLASS))),
            union_body,
        ]),
    )));
    ctx
}

/// Reflexive-symmetric-transitive closure of the pivot's equivalences over all
/// classes, by iterated squaring. Reflexive pairs first in class order, then
/// the remaining pairs ordered by (left, right) class position.
pub fn equivalence_closure(p: &PivotOntology) -> Vec<(usize, usize)> {
    let n = p.classes.len();
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in &p.equiv {
        let (i, j) = (p.class_index(a).unwrap(), p.class_index(b).unwrap());
        m[i][j] = true;
        m[j][i] = true;
    }
    loop {
        let mut next = m.clone();
        for i in 0..n {
            for k in 0..n {
                if m[i][k] {
                    for j in 0..n {
                        next[i][j] |= m[k][j];
                    }
                }
            }
        }
        if next == m {
            break;
        }
        m = next;
    }
    let mut out: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    for (i, row) in m.iter().enumerate() {
        for (j, &set) in row.iter().enumerate() {
            if set && i != j {
                out.push((i, j));
            }
        }
    }
    out
}

/// Emits the ontology-specific context extending [`GENERIC_NAME`].
///
/// Unions with more than two members are split as first member versus the
/// rest, with a `NARY_UNION_SPLIT` warning.
pub fn emit_deep_specific(p: &PivotOntology, name: &str) -> (EventBContext, Vec<Diagnostic>) {
    let mut warnings = Vec::new();
    let mut ctx = EventBContext::new(name);
    ctx.extends = Some(GENERIC_NAME.to_string());
    ctx.constants
        .extend(p.classes.iter().map(|c| c.to_string()));
    ctx.constants
        .extend([IS_A_LIT, EQ_LIT, UNION_OF_LIT].map(String::from));
    let instances = p.all_instances();
    if !instances.is_empty() {
        ctx.constants
            .extend(instances.iter().map(|i| i.to_string()));
        ctx.constants.push(HAS_INSTANCES_LIT.to_string());
    }

    ctx.axiom(Pred::Partition(
        id(CLASS),
        p.classes
            .iter()
            .map(|c| Expr::singleton(Expr::id(c)))
            .collect(),
    ));
    ctx.axiom(id(IS_A_LIT).equals(Expr::set(
        p.is_a.iter().map(|(c, q)| Expr::id(c).maplet(Expr::id(q))),
    )));
    ctx.axiom(
        id(EQ_LIT).equals(Expr::set(
            equivalence_closure(p)
                .into_iter()
                .map(|(i, j)| Expr::id(&p.classes[i]).maplet(Expr::id(&p.classes[j]))),
        )),
    );
    let mut union_items = Vec::new();
    for u in &p.unions {
        if u.members.len() > 2 {
            warnings.push(Diagnostic::warning(
                Code::NaryUnionSplit,
                Location::NONE,
                format!(
                    "union `{}` has {} members; encoded as {{{}}} versus the rest",
                    u.target,
                    u.members.len(),
                    u.members[0]
                ),
            ));
        }
        let first = Expr::singleton(Expr::id(&u.members[0]));
        let rest = Expr::set(u.members[1..].iter().map(Expr::id));
        union_items.push(first.maplet(rest).maplet(Expr::id(&u.target)));
    }
    ctx.axiom(id(UNION_OF_LIT).equals(Expr::SetLit(union_items)));

    if !instances.is_empty() {
        ctx.axiom(Pred::Partition(
            id(INSTANCE),
            instances
                .iter()
                .map(|i| Expr::singleton(Expr::id(i)))
                .collect(),
        ));
        let pairs = p.closed_declared_instances().into_iter().flat_map(|row| {
            row.instances
                .into_iter()
                .map(move |i| Expr::id(&row.class).maplet(Expr::id(i)))
        });
        ctx.axiom(id(HAS_INSTANCES_LIT).equals(Expr::set(pairs)));
    }

    ctx.theorem(id(IS_A_LIT).mem(id(IS_A)));
    ctx.theorem(id(EQ_LIT).mem(id(EQUIVALENCE)));
    ctx.theorem(id(UNION_OF_LIT).mem(id(UNION_OF)));
    (ctx, warnings)
}

pub fn emit_deep(p: &PivotOntology, name: &str) -> (DeepEncodingPair, Vec<Diagnostic>) {
    let (specific, warnings) = emit_deep_specific(p, name);
    (
        DeepEncodingPair {
            generic: emit_deep_generic(),
            specific,
        },
        warnings,
    )
}
