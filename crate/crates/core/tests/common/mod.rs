//! Shared helpers for the integration tests: fixture loading, a random
//! annotation-set generator, a direct AST interpreter and an exhaustive
//! small-scope search.
#![allow(dead_code)]

pub mod brute;
pub mod gen;
pub mod interp;

use annlint::checker::check;
use annlint::compiler::{compile, evaluate, ConstraintIR};
use annlint::finder::{find, FinderResult, Scope};
use annlint::model::well_formed;
use annlint::syntax::{parse_source, AnnSourceFile};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn parse(name: &str, src: &str) -> AnnSourceFile {
    parse_source(name, src).unwrap_or_else(|d| panic!("{name} does not parse: {d:?}"))
}

pub fn compile_one(file: &AnnSourceFile) -> ConstraintIR {
    compile(std::slice::from_ref(file)).unwrap_or_else(|d| panic!("compile failed: {d:?}")).ir
}

/// Parses and compiles a fixture.
pub fn load(name: &str) -> (AnnSourceFile, ConstraintIR) {
    let f = parse(name, &fixture(name));
    let ir = compile_one(&f);
    (f, ir)
}

/// Scope of the oracle-equivalence runs.
pub fn equivalence_scope() -> Scope {
    Scope { ann_min: 1, ann_max: 1, max_classifiers: 2, max_methods: 1, max_fields: 1, ..Scope::default() }
}

/// Finder verdict for one generated set, compared against the exhaustive
/// search. Returns whether the set is satisfiable, or what went wrong.
pub fn equivalence(seed: u64) -> Result<bool, String> {
    let g = gen::generate(seed, &gen::SMALL);
    let scope = equivalence_scope();
    let expected = brute::satisfiable(&g.file.annotations);
    let result = find(&g.ir, &scope, &[]);
    let fail = |why: &str| Err(format!("seed {seed}: {why}\n{}", g.source));
    match (&result, expected) {
        (FinderResult::Sat { witness, .. }, true) => {
            if !well_formed(witness).is_empty() {
                return fail("witness is not well formed");
            }
            if !matches!(evaluate(&g.ir, witness), Ok(v) if v.is_empty()) {
                return fail("witness has violations");
            }
            if !check(witness, &g.ir).is_clean() {
                return fail("checker reports errors on the witness");
            }
            if !interp::Placed::new(witness).accepts(&g.file.annotations) {
                return fail("interpreter rejects the witness");
            }
            let counts_ok = g.ir.annotations.iter().all(|a| witness.uses_of(&a.name).count() == 1);
            if !counts_ok || witness.classifiers.len() > 2 {
                return fail("witness is outside the scope");
            }
            Ok(true)
        }
        (FinderResult::UnsatWithinScope { .. }, false) => Ok(false),
        (r, _) => fail(&format!("finder says {}, exhaustive search says {}", r.verdict(), if expected { "SAT" } else { "UNSAT" })),
    }
}
