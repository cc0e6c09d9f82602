//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::{agreement, arb_shape, diplomas, fixture, gen, read_fixture};
use ontoforge::checker::{
    bind_definitions, check_context_against, derive_interpretation, eval_predicate, Encoding,
    Evaluator, FiniteInterpretation, Value, DEFAULT_CAP,
};
use ontoforge::deep::{emit_deep, EQUIVALENCE};
use ontoforge::eventb::{print_expr, print_pred, Expr, Pred};
use ontoforge::pipeline::{run, Mode, RunConfig};
use ontoforge::shallow::emit_shallow;
use ontoforge::Style;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};
use rand::SeedableRng;

const SHALLOW_AXIOMS: [&str; 7] = [
    "Diplom ⊆ Thing",
    "Bachelor ⊆ Diplom",
    "Master ⊆ Diplom",
    "Engineer ⊆ Diplom",
    "Engineer = Master",
    "Phd ⊆ Diplom",
    "Diplomas_For_Phd = (Engineer ∪ Master)",
];

const GENERIC_AXIOMS: [&str; 4] = [
    "HAS_INSTANCES = CLASS ↔ INSTANCE",
    "IS_A ={IsA | IsA ∈ CLASS ↔ CLASS ∧ (∀ x, y·(x ∈ CLASS ∧ y ∈ CLASS ∧ x ↦ y ∈ IsA ⇔ union({r · r ∈ HAS_INSTANCES| ran({x} ◁ r)}) ⊆ union({r · r ∈ HAS_INSTANCES| ran({y} ◁ r)}) )) )}",
    "EQUIVALENCE = { EQo | EQo ∈ CLASS ↔ CLASS ∧ (∀ x · (x ∈ CLASS ⇒ x↦ x ∈ EQo)) ∧ (∀ x, y · (x ∈ CLASS ∧ y ∈ CLASS ∧ x ↦ y ∈ EQo ⇒ y ↦ x ∈ EQo)) ∧ (∀ x, y, z · (x ∈ CLASS ∧ y ∈ CLASS ∧ z ∈ CLASS ∧ x ↦ y ∈ EQo ∧ y ↦ z ∈ EQo ⇒ x ↦ z ∈ EQo))}",
    "UNION_OF = {unionOf| (unionOf ∈ (ℙ(CLASS) × ℙ(CLASS) ↔ CLASS)) ∧ (∀ x, y, z·(x ∈ ℙ(CLASS) ∧ y ∈ ℙ(CLASS) ∧ z ∈ CLASS ∧ x↦ y ↦ z ∈ unionOf ⇒ ∀ instance· (instance ∈ INSTANCE ⇒ ∃ hasInstance· (hasInstance ∈ HAS_INSTANCES ⇒ (∀ n, m· (n ∈ x ∧ m ∈ y ∧ (n↦ instance ∈ hasInstance ∨ m↦ instance ∈ hasInstance)) ⇒ z ↦ instance ∈ hasInstance)))) ) }",
];

const PARTITION: &str =
    "partition(CLASS,{Diplom},{Bachelor},{Master},{Engineer},{Phd},{Diplomas_For_Phd})";
const IS_A: [&str; 4] = [
    "Master ↦ Diplom",
    "Bachelor ↦ Diplom",
    "Engineer ↦ Diplom",
    "Phd ↦ Diplom",
];
const EQ: [&str; 6] = [
    "Bachelor ↦ Bachelor",
    "Master ↦ Master",
    "Engineer ↦ Engineer",
    "Phd ↦ Phd",
    "Master ↦ Engineer",
    "Engineer ↦ Master",
];
const UNION_OF: [&str; 1] = ["{Master} ↦ {Engineer} ↦ Diplomas_For_Phd"];
const THEOREMS: [&str; 3] = ["isA ∈ IS_A", "eQ ∈ EQUIVALENCE", "unionOf ∈ UNION_OF"];

type Check = Result<String, String>;

fn criterion(n: u32, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let elapsed = start.elapsed();
    let result = match (result, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:.2?}")),
        (r, _) => r,
    };
    let budget = budget
        .map(|b| format!(", budget {b:.0?}"))
        .unwrap_or_default();
    let (tag, detail) = match &result {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("acceptance #{n} {tag} {title} [{elapsed:.2?}{budget}]: {detail}");
    result.is_ok()
}

fn squeeze(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
        .collect()
}

fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn run_one(input: &Path, out: &Path, mode: Mode) -> ontoforge::pipeline::RunOutcome {
    let mut cfg = RunConfig::new(input, out);
    cfg.mode = mode;
    run(&cfg)
}

fn c1() -> Check {
    let dir = tempdir();
    run_one(&fixture("diplomas.owl"), dir.path(), Mode::Shallow);
    let written =
        fs::read_to_string(dir.path().join("Diplomas_Ontology.ctx")).map_err(|e| e.to_string())?;
    if written != read_fixture("golden/shallow/Diplomas_Ontology.ctx") {
        return Err("Diplomas_Ontology.ctx differs from the golden".into());
    }
    let ctx = emit_shallow(&diplomas(), "Diplomas_Ontology");
    let mut got: Vec<String> = ctx
        .axioms
        .iter()
        .map(|l| print_pred(&l.pred, Style::Unicode))
        .collect();
    let mut want: Vec<String> = SHALLOW_AXIOMS.iter().map(|s| s.to_string()).collect();
    got.sort();
    want.sort();
    if got != want {
        return Err(format!("axiom multiset differs: got {got:?}"));
    }
    Ok("7 axioms as listed; byte-exact against golden".into())
}

fn literal_items(ctx: &ontoforge::EventBContext, name: &str) -> BTreeSet<String> {
    ctx.axioms
        .iter()
        .find_map(|l| match &l.pred {
            Pred::Eq(Expr::Ident(n), Expr::SetLit(items)) if n == name => Some(
                items
                    .iter()
                    .map(|i| print_expr(i, Style::Unicode))
                    .collect(),
            ),
            _ => None,
        })
        .unwrap_or_default()
}

fn c2() -> Check {
    let dir = tempdir();
    run_one(&fixture("diplomas.owl"), dir.path(), Mode::Deep);
    let mut failures = Vec::new();
    for name in ["Ontology_Model.ctx", "Diplomas_Ontology.ctx"] {
        let written = fs::read_to_string(dir.path().join(name)).unwrap_or_default();
        if written != read_fixture(&format!("golden/deep/{name}")) {
            failures.push(format!("{name} differs from the golden"));
        }
    }
    let (pair, _) = emit_deep(&diplomas(), "Diplomas_Ontology");
    let generic: Vec<String> = pair
        .generic
        .axioms
        .iter()
        .map(|l| squeeze(&print_pred(&l.pred, Style::Unicode)))
        .collect();
    let expected: Vec<String> = GENERIC_AXIOMS.iter().map(|s| squeeze(s)).collect();
    for (i, want) in expected.iter().enumerate() {
        if generic.get(i) != Some(want) {
            failures.push(format!(
                "generic axm{} differs from the reference listing",
                i + 1
            ));
        }
    }
    if generic.len() != 4 {
        failures.push(format!("generic context has {} axioms", generic.len()));
    }
    let spec = &pair.specific;
    if squeeze(&print_pred(&spec.axioms[0].pred, Style::Unicode)) != squeeze(PARTITION) {
        failures.push("partition axiom differs".into());
    }
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    for (name, want) in [
        ("isA", set(&IS_A)),
        ("eQ", set(&EQ)),
        ("unionOf", set(&UNION_OF)),
    ] {
        let got = literal_items(spec, name);
        if got != want {
            let extra: Vec<_> = got.difference(&want).collect();
            let missing: Vec<_> = want.difference(&got).collect();
            failures.push(format!(
                "{name} has {} maplets, expected exactly {} (extra {extra:?}, missing {missing:?})",
                got.len(),
                want.len()
            ));
        }
    }
    let thms: Vec<String> = spec
        .theorems
        .iter()
        .map(|l| print_pred(&l.pred, Style::Unicode))
        .collect();
    if thms != THEOREMS {
        failures.push(format!("theorems differ: {thms:?}"));
    }
    if failures.is_empty() {
        Ok("generic axm1-4, partition, isA/eQ/unionOf literals and thm1-3 as listed; byte-exact against goldens".into())
    } else {
        Err(failures.join("; "))
    }
}

fn c3() -> Check {
    let p = diplomas();
    let shallow = emit_shallow(&p, "Diplomas_Ontology");
    let sr = check_context_against(
        &shallow,
        None,
        &derive_interpretation(&p, Encoding::Shallow),
        DEFAULT_CAP,
    )
    .map_err(|e| e.to_string())?;
    let (pair, _) = emit_deep(&p, "Diplomas_Ontology");
    let dr = check_context_against(
        &pair.specific,
        Some(&pair.generic),
        &derive_interpretation(&p, Encoding::Deep),
        DEFAULT_CAP,
    )
    .map_err(|e| e.to_string())?;
    let mut falses = Vec::new();
    for e in sr
        .entries
        .iter()
        .map(|e| ("shallow", e))
        .chain(dr.entries.iter().map(|e| ("deep", e)))
    {
        if !e.1.value {
            let trace =
                e.1.trace
                    .as_ref()
                    .map(|t| format!(" ({t})"))
                    .unwrap_or_default();
            falses.push(format!(
                "{} {}.{} FALSE{trace}",
                e.0, e.1.context, e.1.label
            ));
        }
    }
    let counts = format!(
        "{} shallow + {} deep labels evaluated",
        sr.entries.len(),
        dr.entries.len()
    );
    if falses.is_empty() {
        Ok(format!("{counts}, all TRUE"))
    } else {
        Err(format!("{counts}; {}", falses.join("; ")))
    }
}

fn c4() -> Check {
    // oracle: every relation over {A, B}, kept when reflexive, symmetric and transitive
    let atoms = ["A", "B"];
    let pairs: Vec<(usize, usize)> = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).collect();
    let mut oracle = BTreeSet::new();
    for mask in 0u32..16 {
        let rel: BTreeSet<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, p)| *p)
            .collect();
        let refl = (0..2).all(|i| rel.contains(&(i, i)));
        let sym = rel.iter().all(|&(i, j)| rel.contains(&(j, i)));
        let trans = rel.iter().all(|&(i, j)| {
            rel.iter()
                .filter(|&&(k, _)| k == j)
                .all(|&(_, l)| rel.contains(&(i, l)))
        });
        if refl && sym && trans {
            oracle.insert(Value::set(rel.iter().map(|&(i, j)| {
                Value::pair(Value::atom(atoms[i]), Value::atom(atoms[j]))
            })));
        }
    }
    let mut interp = FiniteInterpretation::default();
    interp.carrier_domains.insert(
        "CLASS".into(),
        atoms.iter().map(|a| Value::atom(a)).collect(),
    );
    interp.carrier_domains.insert("INSTANCE".into(), Vec::new());
    bind_definitions(&ontoforge::deep::emit_deep_generic(), &mut interp)
        .map_err(|e| e.to_string())?;
    let got = Evaluator::new(&interp)
        .materialize(&Expr::id(EQUIVALENCE))
        .map_err(|e| e.to_string())?;
    let got = got.as_set().cloned().unwrap_or_default();
    if oracle.len() != 2 {
        return Err(format!("oracle found {} relations", oracle.len()));
    }
    if got != oracle {
        return Err(format!(
            "materialized EQUIVALENCE has {} relations: {}",
            got.len(),
            Value::set(got.clone())
        ));
    }
    Ok(format!(
        "{} of 16 relations: {}",
        got.len(),
        Value::set(got)
    ))
}

fn c5() -> Check {
    const CASES: u32 = 200;
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let strategy = arb_shape();
    let agrees = |a: &common::Agreement| matches!((&a.shallow, &a.deep), (Ok(x), Ok(y)) if x == y);

    let mut runner = TestRunner::new_with_rng(
        config.clone(),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let mut discrepancies = 0;
    let mut shallow_true = 0;
    for _ in 0..CASES {
        let shape = strategy
            .new_tree(&mut runner)
            .map_err(|e| e.to_string())?
            .current();
        let a = agreement(&shape.pivot());
        shallow_true += usize::from(a.shallow == Ok(true));
        if !agrees(&a) {
            discrepancies += 1;
        }
    }
    if discrepancies == 0 {
        return Ok(format!(
            "{CASES} ontologies, 0 discrepancies ({shallow_true} shallow all-true)"
        ));
    }

    let mut shrinker =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let result = shrinker.run(&strategy, |shape| {
        let a = agreement(&shape.pivot());
        proptest::prop_assert!(
            agrees(&a),
            "shallow {:?}, deep {:?}, deep false: {:?}",
            a.shallow,
            a.deep,
            a.deep_false
        );
        Ok(())
    });
    let shrunk = match result {
        Err(TestError::Fail(reason, shape)) => {
            let p = shape.pivot();
            let json: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
            format!("shrunk counterexample {json}: {reason}")
        }
        other => format!("shrinking did not reproduce: {other:?}"),
    };
    Err(format!(
        "{discrepancies}/{CASES} discrepancies ({shallow_true} shallow all-true); {shrunk}"
    ))
}

fn c6() -> Check {
    const CASES: usize = 1000;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6f6e746f);
    let mut disagreements = Vec::new();
    let mut trues = 0;
    for k in 0..CASES {
        let case = gen::random_case(&mut rng);
        let want = case.model.holds(&case.pred);
        trues += usize::from(want);
        let got = eval_predicate(&case.pred, &case.interp);
        if got.as_ref().map(|r| r.value) != Ok(want) {
            disagreements.push(format!(
                "case {k}: {} expected {want}, got {got:?}",
                print_pred(&case.pred, Style::Ascii)
            ));
        }
    }
    if disagreements.is_empty() {
        Ok(format!(
            "{CASES} predicates, 0 disagreements ({trues} true)"
        ))
    } else {
        Err(format!(
            "{} disagreements; first: {}",
            disagreements.len(),
            disagreements[0]
        ))
    }
}

fn corpus() -> Vec<PathBuf> {
    let mut files = Vec::new();
    for dir in [fixture(""), fixture("robustness")] {
        let mut here: Vec<PathBuf> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "owl"))
            .collect();
        here.sort();
        files.extend(here);
    }
    files
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(
                    path.strip_prefix(root).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                );
            }
        }
    }
    out
}

fn c7() -> Check {
    let inputs = corpus();
    let runs: Vec<(tempfile::TempDir, ontoforge::pipeline::RunOutcome)> = (0..2)
        .map(|_| {
            let dir = tempdir();
            let cfg = RunConfig {
                inputs: inputs.clone(),
                mode: Mode::Both,
                check: true,
                dump_pivot: true,
                report_json: true,
                ..RunConfig::new("", dir.path())
            };
            let outcome = run(&cfg);
            (dir, outcome)
        })
        .collect();
    let (a, b) = (tree(runs[0].0.path()), tree(runs[1].0.path()));
    if a.is_empty() {
        return Err("no output written".into());
    }
    if a != b {
        let differing: Vec<_> = a
            .keys()
            .chain(b.keys())
            .filter(|k| a.get(*k) != b.get(*k))
            .collect();
        return Err(format!("output trees differ at {differing:?}"));
    }
    if runs[0].1.stdout != runs[1].1.stdout || runs[0].1.stderr != runs[1].1.stderr {
        return Err("console output differs".into());
    }
    Ok(format!(
        "{} inputs, {} files byte-identical across two runs",
        inputs.len(),
        a.len()
    ))
}

fn codes(lines: &[String]) -> BTreeSet<String> {
    lines
        .iter()
        .filter_map(|l| {
            let start = l
                .find("warning[")
                .map(|i| i + 8)
                .or_else(|| l.find("error[").map(|i| i + 6))?;
            let end = start + l[start..].find(']')?;
            Some(l[start..end].to_string())
        })
        .collect()
}

fn c8() -> Check {
    let manifest = read_fixture("robustness/expected.txt");
    let mut cases = 0;
    let mut failures = Vec::new();
    for line in manifest
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
    {
        let (file, expected) = line.split_once(' ').ok_or("bad manifest line")?;
        let expected: BTreeSet<String> = if expected == "-" {
            BTreeSet::new()
        } else {
            expected.split(',').map(str::to_string).collect()
        };
        cases += 1;
        let dir = tempdir();
        let mut cfg = RunConfig::new(fixture("robustness").join(file), dir.path());
        cfg.mode = Mode::Both;
        cfg.check = true;
        match catch_unwind(AssertUnwindSafe(|| run(&cfg))) {
            Err(_) => failures.push(format!("{file}: crashed")),
            Ok(outcome) => {
                let got = codes(&outcome.stderr);
                if got != expected {
                    failures.push(format!("{file}: expected {expected:?}, got {got:?}"));
                }
            }
        }
    }
    if cases != 50 {
        failures.push(format!("corpus has {cases} cases, expected 50"));
    }
    if failures.is_empty() {
        Ok(format!("{cases} cases, documented codes, no crash"))
    } else {
        Err(failures.join("; "))
    }
}

fn main() {
    // criteria deliberately run in order; panics are reported as failures
    std::panic::set_hook(Box::new(|_| {}));
    let second = Some(Duration::from_secs(1));
    let results = [
        criterion(1, "shallow golden fidelity", second, c1),
        criterion(2, "deep golden fidelity", second, c2),
        criterion(
            3,
            "oracle check on the derived interpretation",
            Some(Duration::from_secs(10)),
            c3,
        ),
        criterion(4, "EQUIVALENCE brute force over 2 classes", None, c4),
        criterion(5, "shallow/deep agreement on random ontologies", None, c5),
        criterion(6, "evaluator vs reference evaluator", None, c6),
        criterion(7, "determinism", None, c7),
        criterion(8, "robustness corpus", None, c8),
    ];
    let passed = results.iter().filter(|ok| **ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
