//! Language-neutral intermediate representation between ontology readers and
//! the Event-B emitters.
//!
//! Nothing in here is OWL-specific; another front end only has to produce a
//! [`PivotOntology`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::diag::{Code, Diagnostic, Location};
use crate::owl::OwlDocument;

/// Names that must never be used verbatim as generated identifiers: the
/// clause keywords, the names the emitters introduce themselves, and the
/// ascii operator words.
pub const RESERVED: &[&str] = &[
    "CONTEXT",
    "EXTENDS",
    "SETS",
    "CONSTANTS",
    "AXIOMS",
    "THEOREMS",
    "END",
    "Thing",
    "CLASS",
    "PROPERTY",
    "INSTANCE",
    "VALUES",
    "HAS_INSTANCES",
    "IS_A",
    "EQUIVALENCE",
    "UNION_OF",
    "isA",
    "eQ",
    "unionOf",
    "hasInstances",
    "partition",
    "union",
    "inter",
    "ran",
    "dom",
    "POW",
    "or",
    "not",
    "BOOL",
    "TRUE",
    "FALSE",
    "bool",
    "card",
];

/// Maps an arbitrary non-empty name onto a valid, non-reserved identifier.
///
/// Characters outside `[A-Za-z0-9_]` become `_`, a leading non-letter gets a
/// `c_` prefix, and reserved names get a trailing `_`. Idempotent.
pub fn sanitize_identifier(raw: &str) -> String {
    let mut out: String = raw
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if !out.starts_with(|c: char| c.is_ascii_alphabetic()) {
        out.insert_str(0, "c_");
    }
    if RESERVED.contains(&out.as_str()) {
        out.push('_');
    }
    out
}

pub fn is_valid_identifier(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_alphabetic())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&s)
}

macro_rules! ident_newtype {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            /// Sanitizes `raw` into an identifier.
            pub fn new(raw: &str) -> Self {
                $name(sanitize_identifier(raw))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

ident_newtype!(ClassId);
ident_newtype!(InstanceId);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnionDef {
    pub target: ClassId,
    pub members: Vec<ClassId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassInstances {
    pub class: ClassId,
    pub instances: Vec<InstanceId>,
}

/// The intermediate ontology.
///
/// Collections are ordered: `classes` in document order, relation pairs in
/// first-declaration order. `equiv` holds both orientations of every pair and
/// never a reflexive pair; closures are left to the emitters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PivotOntology {
    pub classes: Vec<ClassId>,
    pub is_a: Vec<(ClassId, ClassId)>,
    pub equiv: Vec<(ClassId, ClassId)>,
    pub unions: Vec<UnionDef>,
    /// Only classes with at least one instance, in class order.
    pub instances_of: Vec<ClassInstances>,
}

impl PivotOntology {
    pub fn class_index(&self, c: &ClassId) -> Option<usize> {
        self.classes.iter().position(|x| x == c)
    }

    pub fn instances(&self, c: &ClassId) -> &[InstanceId] {
        self.instances_of
            .iter()
            .find(|ci| &ci.class == c)
            .map_or(&[], |ci| ci.instances.as_slice())
    }

    /// All distinct instances in first-assignment order.
    pub fn all_instances(&self) -> Vec<InstanceId> {
        let mut out: Vec<InstanceId> = Vec::new();
        for ci in &self.instances_of {
            for i in &ci.instances {
                if !out.contains(i) {
                    out.push(i.clone());
                }
            }
        }
        out
    }

    /// Equivalence pairs with one orientation per pair, oriented as first
    /// declared.
    pub fn equiv_pairs(&self) -> Vec<(ClassId, ClassId)> {
        let mut out: Vec<(ClassId, ClassId)> = Vec::new();
        for (a, b) in &self.equiv {
            if !out
                .iter()
                .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
            {
                out.push((a.clone(), b.clone()));
            }
        }
        out
    }

    pub fn union_of(&self, c: &ClassId) -> Option<&UnionDef> {
        self.unions.iter().find(|u| &u.target == c)
    }

    /// Adds an `is_a` pair unless present.
    pub fn add_is_a(&mut self, child: ClassId, parent: ClassId) {
        let pair = (child, parent);
        if !self.is_a.contains(&pair) {
            self.is_a.push(pair);
        }
    }

    /// Adds both orientations of an equivalence; reflexive pairs are dropped.
    pub fn add_equiv(&mut self, a: ClassId, b: ClassId) {
        if a == b {
            return;
        }
        for pair in [(a.clone(), b.clone()), (b, a)] {
            if !self.equiv.contains(&pair) {
                self.equiv.push(pair);
            }
        }
    }

    pub fn add_instance(&mut self, class: &ClassId, inst: InstanceId) {
        let pos = self
            .class_index(class)
            .expect("instance of an undeclared class");
        match self.instances_of.iter_mut().find(|ci| &ci.class == class) {
            Some(ci) => {
                if !ci.instances.contains(&inst) {
                    ci.instances.push(inst);
                }
            }
            None => {
                let at = self
                    .instances_of
                    .iter()
                    .position(|ci| self.class_index(&ci.class).unwrap_or(usize::MAX) > pos)
                    .unwrap_or(self.instances_of.len());
                self.instances_of.insert(
                    at,
                    ClassInstances {
                        class: class.clone(),
                        instances: vec![inst],
                    },
                );
            }
        }
    }

    /// Canonical JSON rendering used by `--dump-pivot`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("pivot serializes");
        s.push('\n');
        s
    }

    /// Set-semantics closure of an instance assignment.
    ///
    /// `seed` gives initial members per class (indices into `instances`).
    /// Propagates upward along `is_a`, across `equiv`, from union members to
    /// targets, and pushes any instance of a union target that lies in no
    /// member into the first member. The result satisfies every inclusion,
    /// equality and union the ontology states.
    pub fn close_instances(&self, seed: Vec<BTreeSet<usize>>) -> Vec<BTreeSet<usize>> {
        assert_eq!(seed.len(), self.classes.len());
        let idx: HashMap<&ClassId, usize> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let mut sets = seed;
        let flow = |sets: &mut Vec<BTreeSet<usize>>, from: usize, to: usize| -> bool {
            if from == to {
                return false;
            }
            let missing: Vec<usize> = sets[from].difference(&sets[to]).copied().collect();
            sets[to].extend(&missing);
            !missing.is_empty()
        };
        loop {
            let mut changed = false;
            for (c, p) in &self.is_a {
                changed |= flow(&mut sets, idx[c], idx[p]);
            }
            for (a, b) in &self.equiv {
                changed |= flow(&mut sets, idx[a], idx[b]);
            }
            for u in &self.unions {
                let t = idx[&u.target];
                for m in &u.members {
                    changed |= flow(&mut sets, idx[m], t);
                }
                let covered: BTreeSet<usize> = u
                    .members
                    .iter()
                    .flat_map(|m| sets[idx[m]].iter().copied())
                    .collect();
                let stray: Vec<usize> = sets[t].difference(&covered).copied().collect();
                if !stray.is_empty() {
                    sets[idx[&u.members[0]]].extend(stray);
                    changed = true;
                }
            }
            if !changed {
                return sets;
            }
        }
    }

    /// Closure of the declared instance assignment, as (class, instances)
    /// rows in class order; classes without instances are omitted.
    pub fn closed_declared_instances(&self) -> Vec<ClassInstances> {
        let all = self.all_instances();
        let seed = self
            .classes
            .iter()
            .map(|c| {
                self.instances(c)
                    .iter()
                    .map(|i| all.iter().position(|x| x == i).unwrap())
                    .collect()
            })
            .collect();
        self.close_instances(seed)
            .into_iter()
            .zip(&self.classes)
            .filter(|(s, _)| !s.is_empty())
            .map(|(s, c)| ClassInstances {
                class: c.clone(),
                instances: s.into_iter().map(|i| all[i].clone()).collect(),
            })
            .collect()
    }
}

/// Builds the pivot from a parsed document.
pub fn to_pivot(doc: &OwlDocument) -> Result<PivotOntology, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut pivot = PivotOntology::default();

    // sanitized name -> (original, location)
    let mut names: HashMap<String, (String, Location)> = HashMap::new();
    let mut claim = |raw: &str, loc: Location, diags: &mut Vec<Diagnostic>| {
        let id = sanitize_identifier(raw);
        match names.get(&id) {
            Some((orig, _)) if orig != raw => diags.push(Diagnostic::error(
                Code::IdentifierCollision,
                loc,
                format!("`{orig}` and `{raw}` both map to identifier `{id}`"),
            )),
            Some(_) => {}
            None => {
                names.insert(id.clone(), (raw.to_string(), loc));
            }
        }
        id
    };

    let mut raw_to_class: HashMap<&str, ClassId> = HashMap::new();
    for c in &doc.classes {
        let id = ClassId(claim(&c.id, c.location, &mut diags));
        if raw_to_class.insert(c.id.as_str(), id.clone()).is_some() {
            diags.push(Diagnostic::error(
                Code::DuplicateClass,
                c.location,
                format!("class `{}` declared twice", c.id),
            ));
            continue;
        }
        pivot.classes.push(id);
    }
    for c in &doc.classes {
        for ind in &c.individuals {
            claim(ind, c.location, &mut diags);
        }
    }

    let resolve =
        |raw: &str, from: &str, loc: Location, diags: &mut Vec<Diagnostic>| -> Option<ClassId> {
            let r = raw_to_class.get(raw).cloned();
            if r.is_none() {
                diags.push(Diagnostic::error(
                    Code::DanglingReference,
                    loc,
                    format!("class `{from}` refers to `{raw}`, which is never declared"),
                ));
            }
            r
        };

    for c in &doc.classes {
        let Some(me) = raw_to_class.get(c.id.as_str()).cloned() else {
            continue;
        };
        for s in &c.super_refs {
            if let Some(p) = resolve(s, &c.id, c.location, &mut diags) {
                pivot.add_is_a(me.clone(), p);
            }
        }
        for e in &c.equivalent_refs {
            if let Some(o) = resolve(e, &c.id, c.location, &mut diags) {
                pivot.add_equiv(me.clone(), o);
            }
        }
        if let Some(members) = &c.union_members {
            let resolved: Vec<ClassId> = members
                .iter()
                .filter_map(|m| resolve(m, &c.id, c.location, &mut diags))
                .collect();
            if resolved.contains(&me) {
                diags.push(Diagnostic::error(
                    Code::SelfUnion,
                    c.location,
                    format!("class `{}` lists itself in its own unionOf", c.id),
                ));
            } else if resolved.len() == members.len() {
                if resolved.iter().collect::<BTreeSet<_>>().len() < 2 {
                    diags.push(Diagnostic::error(
                        Code::UnionTooSmall,
                        c.location,
                        format!("unionOf of `{}` needs at least two distinct classes", c.id),
                    ));
                } else {
                    pivot.unions.push(UnionDef {
                        target: me.clone(),
                        members: resolved,
                    });
                }
            }
        }
        for ind in &c.individuals {
            pivot.add_instance(&me, InstanceId::new(ind));
        }
    }

    let class_names: BTreeSet<&str> = pivot.classes.iter().map(ClassId::as_str).collect();
    for inst in pivot.all_instances() {
        if class_names.contains(inst.as_str()) {
            diags.push(Diagnostic::error(
                Code::IdentifierCollision,
                Location::NONE,
                format!("individual `{inst}` has the same identifier as a class"),
            ));
        }
    }

    if diags.is_empty() {
        Ok(pivot)
    } else {
        Err(diags)
    }
}

/// Strongly connected components of the `is_a` graph that contain a cycle,
/// each listed in class order. Tarjan's depth-first search.
pub fn subsumption_cycles(p: &PivotOntology) -> Vec<Vec<ClassId>> {
    let n = p.classes.len();
    let idx: HashMap<&ClassId, usize> = p.classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut succ = vec![Vec::new(); n];
    let mut self_loop = vec![false; n];
    for (c, q) in &p.is_a {
        let (a, b) = (idx[c], idx[q]);
        succ[a].push(b);
        if a == b {
            self_loop[a] = true;
        }
    }

    struct Tarjan<'g> {
        succ: &'g [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comps: Vec<Vec<usize>>,
    }
    impl Tarjan<'_> {
        fn visit(&mut self, v: usize) {
            self.index[v] = Some(self.next);
            self.low[v] = self.next;
            self.next += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for &w in &self.succ[v] {
                match self.index[w] {
                    None => {
                        self.visit(w);
                        self.low[v] = self.low[v].min(self.low[w]);
                    }
                    Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                    Some(_) => {}
                }
            }
            if Some(self.low[v]) == self.index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = self.stack.pop().unwrap();
                    self.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                self.comps.push(comp);
            }
        }
    }

    let mut t = Tarjan {
        succ: &succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        comps: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    let mut cycles: Vec<Vec<usize>> = t
        .comps
        .into_iter()
        .filter(|c| c.len() > 1 || self_loop[c[0]])
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    cycles.sort();
    cycles
        .into_iter()
        .map(|c| c.into_iter().map(|i| p.classes[i].clone()).collect())
        .collect()
}

/// Reflexive-transitive reachability along `is_a`, indexed by class position.
pub(crate) fn is_a_reachability(p: &PivotOntology) -> Vec<Vec<bool>> {
    let n = p.classes.len();
    let idx: HashMap<&ClassId, usize> = p.classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for (c, q) in &p.is_a {
        reach[idx[c]][idx[q]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Reports modelling smells. Never errors: each case is representable in
/// both encodings.
pub fn validate_pivot(p: &PivotOntology) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for cycle in subsumption_cycles(p) {
        let names: Vec<&str> = cycle.iter().map(ClassId::as_str).collect();
        out.push(Diagnostic::warning(
            Code::CycleInSubsumption,
            Location::NONE,
            format!(
                "subClassOf cycle through {}; these classes denote the same set",
                names.join(", ")
            ),
        ));
    }

    let reach = is_a_reachability(p);
    for (a, b) in p.equiv_pairs() {
        let (i, j) = (p.class_index(&a).unwrap(), p.class_index(&b).unwrap());
        if reach[i][j] || reach[j][i] {
            out.push(Diagnostic::warning(
                Code::RedundantEquivSubclass,
                Location::NONE,
                format!("`{a}` is declared equivalent to `{b}` and is also a subclass or superclass of it"),
            ));
        }
    }

    for u in &p.unions {
        if !p.instances(&u.target).is_empty() {
            out.push(Diagnostic::warning(
                Code::UnionTargetWithInstances,
                Location::NONE,
                format!(
                    "union class `{}` also has individuals assigned directly",
                    u.target
                ),
            ));
        }
    }
    out
}
