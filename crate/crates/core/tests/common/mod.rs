#![allow(dead_code)]

pub mod gen;
pub mod reference;

use std::path::PathBuf;

use ontoforge::checker::{check_context_against, derive_interpretation, Encoding, DEFAULT_CAP};
use ontoforge::deep::emit_deep;
use ontoforge::pivot::{ClassId, InstanceId, PivotOntology};
use ontoforge::shallow::emit_shallow;
use ontoforge::{parse_owl, to_pivot};
use proptest::prelude::*;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap()
}

pub fn diplomas() -> PivotOntology {
    to_pivot(&parse_owl(&read_fixture("diplomas.owl")).unwrap()).unwrap()
}

/// Raw shape of a small random ontology, as class indices.
#[derive(Debug, Clone)]
pub struct Shape {
    pub classes: usize,
    pub is_a: Vec<(usize, usize)>,
    pub equiv: Vec<(usize, usize)>,
    pub union: Option<(usize, Vec<usize>)>,
    pub instances: Vec<usize>,
}

impl Shape {
    pub fn pivot(&self) -> PivotOntology {
        let class = |i: usize| ClassId::new(&format!("C{i}"));
        let mut p = PivotOntology {
            classes: (0..self.classes).map(class).collect(),
            ..Default::default()
        };
        for &(a, b) in &self.is_a {
            if a != b {
                p.add_is_a(class(a), class(b));
            }
        }
        for &(a, b) in &self.equiv {
            p.add_equiv(class(a), class(b));
        }
        if let Some((t, members)) = &self.union {
            let mut ms: Vec<ClassId> = Vec::new();
            for &m in members {
                if m != *t && !ms.contains(&class(m)) {
                    ms.push(class(m));
                }
            }
            if ms.len() >= 2 {
                p.unions.push(ontoforge::pivot::UnionDef {
                    target: class(*t),
                    members: ms,
                });
            }
        }
        for (k, &c) in self.instances.iter().enumerate() {
            p.add_instance(&class(c), InstanceId::new(&format!("i{k}")));
        }
        p
    }
}

/// Ontologies with at most 4 classes and 3 instances.
pub fn arb_shape() -> impl Strategy<Value = Shape> {
    (1usize..=4).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec((0..n, 0..n), 0..=4),
            proptest::collection::vec((0..n, 0..n), 0..=2),
            proptest::option::of((0..n, proptest::collection::vec(0..n, 2..=3))),
            proptest::collection::vec(0..n, 0..=3),
        )
            .prop_map(|(classes, is_a, equiv, union, instances)| Shape {
                classes,
                is_a,
                equiv,
                union,
                instances,
            })
    })
}

pub struct Agreement {
    pub shallow: Result<bool, String>,
    pub deep: Result<bool, String>,
    pub deep_false: Vec<String>,
}

/// Checks both encodings of `p` under their derived interpretations.
pub fn agreement(p: &PivotOntology) -> Agreement {
    let ctx = emit_shallow(p, "Random_Ontology");
    let shallow = check_context_against(
        &ctx,
        None,
        &derive_interpretation(p, Encoding::Shallow),
        DEFAULT_CAP,
    )
    .map(|r| r.all_true())
    .map_err(|e| e.to_string());
    let (pair, _) = emit_deep(p, "Random_Ontology");
    let report = check_context_against(
        &pair.specific,
        Some(&pair.generic),
        &derive_interpretation(p, Encoding::Deep),
        DEFAULT_CAP,
    );
    let deep_false = report
        .as_ref()
        .map(|r| {
            r.entries
                .iter()
                .filter(|e| !e.value)
                .map(|e| format!("{}.{}", e.context, e.label))
                .collect()
        })
        .unwrap_or_default();
    Agreement {
        shallow,
        deep: report.map(|r| r.all_true()).map_err(|e| e.to_string()),
        deep_false,
    }
}
