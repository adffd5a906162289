//! Seeded random annotation sets that pass semantic analysis.

use std::fmt::Write;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use annlint::compiler::{compile, ConstraintIR};
use annlint::model::{
    well_formed, AnnotationUse, Classifier, ClassifierKind, Field, Method, ProgramModel, Visibility,
};
use annlint::syntax::{parse_source, AnnSourceFile};

pub const NAMES: [&str; 3] = ["A", "B", "C"];

const CONTAINERS: [&str; 4] = ["class", "interface", "annotation", "enum"];
const MEMBERS: [&str; 3] = ["method", "field", "constructor"];
const VISIBILITIES: [&str; 4] = ["public", "protected", "package", "private"];

pub struct Sizes {
    pub max_anns: usize,
    pub max_constraints: usize,
    pub max_statements: usize,
}

pub const SMALL: Sizes = Sizes { max_anns: 3, max_constraints: 2, max_statements: 2 };

const KINDS: [&str; 6] = ["class", "interface", "annotation", "method", "field", "constructor"];

fn target(rng: &mut ChaCha8Rng, scope: Option<&str>, home: &'static str) -> &'static str {
    match scope {
        Some(s) if MEMBERS.contains(&s) => *CONTAINERS[..3].choose(rng).unwrap(),
        Some(_) => *MEMBERS.choose(rng).unwrap(),
        None if rng.random_bool(0.5) => home,
        // Enums are outside the default scope; keep them rare.
        None if rng.random_bool(0.05) => "enum",
        None => *KINDS.choose(rng).unwrap(),
    }
}

fn statement(rng: &mut ChaCha8Rng, scope: Option<&str>, home: &'static str, names: &[&str]) -> String {
    let ann = if rng.random_bool(0.4) { Some(*names.choose(rng).unwrap()) } else { None };
    if let Some(a) = ann {
        if rng.random_bool(0.3) {
            return format!("@{a}");
        }
    }
    let t = target(rng, scope, home);
    let mut words: Vec<String> = ann.map(|a| format!("@{a}")).into_iter().collect();
    if rng.random_bool(0.4) {
        words.push(VISIBILITIES.choose(rng).unwrap().to_string());
    }
    if rng.random_bool(0.25) {
        words.push("final".into());
    }
    if t != "field" && rng.random_bool(0.15) {
        words.push("abstract".into());
    }
    if rng.random_bool(0.15) {
        words.push("static".into());
    }
    words.push(t.to_string());
    words.join(" ")
}

/// A constraint for an annotation that mostly targets `home`. A pinned
/// constraint is an unscoped require, which fixes the allowed targets.
fn constraint(rng: &mut ChaCha8Rng, home: &'static str, pin: bool, names: &[&str], max_statements: usize) -> String {
    let require = pin || rng.random_bool(0.65);
    let scope = if pin || rng.random_bool(0.3) {
        None
    } else if rng.random_bool(0.75) {
        Some(home)
    } else {
        Some(*KINDS.choose(rng).unwrap())
    };
    let all = require && scope.is_some_and(|s| CONTAINERS.contains(&s)) && rng.random_bool(0.3);
    let n = rng.random_range(1..=max_statements);
    let stmts: Vec<String> = (0..n).map(|_| statement(rng, scope, home, names)).collect();
    let mut s = String::new();
    if let Some(sc) = scope {
        let _ = write!(s, "at {sc}: ");
    }
    s.push_str(if require { "require " } else { "forbid " });
    if all {
        s.push_str("all ");
    }
    s.push_str(&stmts.join(if require { " or " } else { " and " }));
    s.push(';');
    s
}

/// One random source; may occasionally fail analysis.
pub fn candidate(seed: u64, sizes: &Sizes) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=sizes.max_anns);
    let names = &NAMES[..n];
    let mut src = String::new();
    for name in names {
        let home = *KINDS.choose(&mut rng).unwrap();
        let _ = writeln!(src, "annotation {name} {{");
        let pinned = rng.random_bool(0.7);
        for i in 0..rng.random_range(0..=sizes.max_constraints) {
            let pin = i == 0 && pinned;
            let _ = writeln!(src, "    {}", constraint(&mut rng, home, pin, names, sizes.max_statements));
        }
        src.push_str("}\n");
    }
    src
}

pub struct Generated {
    pub seed: u64,
    pub source: String,
    pub file: AnnSourceFile,
    pub ir: ConstraintIR,
}

/// A compilable set derived from `seed`; candidates that fail analysis are
/// redrawn.
pub fn generate(seed: u64, sizes: &Sizes) -> Generated {
    for attempt in 0u64.. {
        let source = candidate(seed.wrapping_mul(1_000_003).wrapping_add(attempt), sizes);
        if let Ok(file) = parse_source("gen.ann", &source) {
            if let Ok(c) = compile(std::slice::from_ref(&file)) {
                return Generated { seed, source, file, ir: c.ir };
            }
        }
    }
    unreachable!()
}

fn visibility(rng: &mut ChaCha8Rng) -> Visibility {
    *Visibility::ALL.choose(rng).unwrap()
}

fn model_candidate(rng: &mut ChaCha8Rng, anns: &[&str]) -> ProgramModel {
    let kinds = [ClassifierKind::Class, ClassifierKind::Class, ClassifierKind::Interface, ClassifierKind::Annotation];
    let mut classifiers = Vec::new();
    for i in 0..rng.random_range(1..=2) {
        let name = format!("C{}", i + 1);
        let kind = *kinds.choose(rng).unwrap();
        let mut c = Classifier {
            visibility: if rng.random_bool(0.5) { Visibility::Public } else { Visibility::Package },
            is_abstract: rng.random_bool(0.3),
            is_static: rng.random_bool(0.2),
            is_final: kind != ClassifierKind::Interface && rng.random_bool(0.3),
            ..Classifier::new(&name, kind)
        };
        let has_ctor = kind == ClassifierKind::Class && rng.random_bool(0.4);
        if has_ctor {
            c.methods.push(Method { visibility: visibility(rng), is_final: rng.random_bool(0.2), is_constructor: true, ..Method::new(&name) });
        }
        for j in 0..rng.random_range(0..=2) {
            c.methods.push(Method {
                visibility: visibility(rng),
                is_abstract: c.effective_abstract() && rng.random_bool(0.5),
                is_static: rng.random_bool(0.3),
                is_final: rng.random_bool(0.3),
                ..Method::new(&format!("m{}", j + 1))
            });
        }
        if kind != ClassifierKind::Annotation {
            for j in 0..rng.random_range(0..=2) {
                c.fields.push(Field {
                    visibility: visibility(rng),
                    is_static: rng.random_bool(0.3),
                    is_final: rng.random_bool(0.3),
                    ..Field::new(&format!("f{}", j + 1))
                });
            }
        }
        classifiers.push(c);
    }
    let mut model = ProgramModel { classifiers, annotation_uses: Vec::new() };
    let elements = model.elements();
    for ann in anns {
        for el in &elements {
            if rng.random_bool(0.3) {
                model.annotation_uses.push(AnnotationUse::new(ann, model.path(*el)));
            }
        }
    }
    model
}

/// A random well-formed model with up to two classifiers, carrying random
/// uses of `anns`.
pub fn model(seed: u64, anns: &[&str]) -> ProgramModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = model_candidate(&mut rng, anns);
        if m.validate_structure().is_ok() && well_formed(&m).is_empty() {
            return m;
        }
    }
}

/// A random statement that is legal under `scope`.
pub fn random_statement(seed: u64, scope: Option<&str>, names: &[&str]) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let home = *KINDS.choose(&mut rng).unwrap();
    statement(&mut rng, scope, home, names)
}

/// A random constraint line.
pub fn random_constraint(seed: u64, names: &[&str]) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let home = *KINDS.choose(&mut rng).unwrap();
    constraint(&mut rng, home, false, names, 2)
}
