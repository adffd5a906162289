mod common;

use std::collections::BTreeSet;

use annlint::compiler::{compile_defs, evaluate, predicate_holds, ConstraintIR};
use annlint::finder::{find, Scope};
use annlint::model::{ElementPath, ElementRef, ProgramModel};
use annlint::syntax::ast::{AnnotationDef, ConstraintDef, ConstraintKind, Statement, TargetType};
use annlint::syntax::{parse_source, pretty_print};
use proptest::prelude::*;

use common::gen::{self, Sizes, NAMES};
use common::interp::Placed;

const WIDE: Sizes = Sizes { max_anns: 3, max_constraints: 4, max_statements: 3 };

type Key = (ElementPath, String, Option<usize>);

fn violation_keys(ir: &ConstraintIR, model: &ProgramModel) -> BTreeSet<Key> {
    evaluate(ir, model).unwrap().into_iter().map(|v| (v.target, v.ann, v.origin)).collect()
}

fn interpreter_keys(defs: &[AnnotationDef], model: &ProgramModel) -> BTreeSet<Key> {
    let placed = Placed::new(model);
    let mut out = BTreeSet::new();
    for u in &model.annotation_uses {
        let Some(def) = defs.iter().find(|d| d.name == u.ann) else { continue };
        let (bad, failed) = placed.failures(def, model.resolve(&u.target).unwrap());
        if bad {
            out.insert((u.target.clone(), u.ann.clone(), None));
        }
        out.extend(failed.into_iter().map(|i| (u.target.clone(), u.ann.clone(), Some(i))));
    }
    out
}

fn names_of(defs: &[AnnotationDef]) -> Vec<&str> {
    defs.iter().map(|d| d.name.as_str()).collect()
}

/// A statement parsed in the context of a constraint with the given scope.
fn statement(seed: u64, scope: Option<&str>, names: &[&str]) -> Statement {
    let text = gen::random_statement(seed, scope, names);
    let prefix = scope.map(|s| format!("at {s}: ")).unwrap_or_default();
    let decls: String = names.iter().map(|n| format!("annotation {n} {{ }}\n")).collect();
    let src = format!("{decls}annotation Z {{ {prefix}require {text}; }}");
    let f = parse_source("s.ann", &src).unwrap_or_else(|e| panic!("{src}: {e:?}"));
    f.annotations.last().unwrap().constraints[0].statements[0].clone()
}

/// Uses whose element type the annotation allows, i.e. without a target
/// violation under `ir`.
fn well_targeted(ir: &ConstraintIR, model: &ProgramModel) -> BTreeSet<(ElementPath, String)> {
    let bad: BTreeSet<(ElementPath, String)> =
        violation_keys(ir, model).into_iter().filter(|k| k.2.is_none()).map(|k| (k.0, k.1)).collect();
    model.annotation_uses.iter().map(|u| (u.target.clone(), u.ann.clone())).filter(|k| !bad.contains(k)).collect()
}

/// Whether `c` constrains uses on elements of type `t`. An unscoped require
/// none of whose statements can describe `t` holds vacuously there.
fn applies_to(c: &ConstraintDef, t: TargetType) -> bool {
    c.kind != ConstraintKind::Require || c.scope.is_some() || c.statements.iter().any(|s| s.target.is_none_or(|x| x == t))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn pretty_print_round_trips(seed in any::<u64>()) {
        let src = gen::candidate(seed, &WIDE);
        let Ok(f) = parse_source("a.ann", &src) else { return Ok(()) };
        let printed = pretty_print(&f);
        let again = parse_source("b.ann", &printed).unwrap();
        prop_assert_eq!(pretty_print(&again), printed.clone());
        prop_assert_eq!(compile_defs(&f.annotations), compile_defs(&again.annotations));
    }

    #[test]
    fn evaluate_agrees_with_interpreter(seed in any::<u64>()) {
        let g = gen::generate(seed, &WIDE);
        let model = gen::model(seed, &names_of(&g.file.annotations));
        prop_assert_eq!(violation_keys(&g.ir, &model), interpreter_keys(&g.file.annotations, &model));
    }

    #[test]
    fn duplicated_statements_change_nothing(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = gen::generate(seed, &WIDE);
        let model = gen::model(seed ^ 0x5eed, &names_of(&g.file.annotations));
        let before = violation_keys(&g.ir, &model);
        let mut defs = g.file.annotations.clone();
        let all: Vec<(usize, usize)> =
            defs.iter().enumerate().flat_map(|(a, d)| (0..d.constraints.len()).map(move |c| (a, c))).collect();
        if all.is_empty() {
            return Ok(());
        }
        let (a, c) = all[pick.index(all.len())];
        let st = defs[a].constraints[c].statements[0].clone();
        defs[a].constraints[c].statements.push(st);
        prop_assert_eq!(violation_keys(&compile_defs(&defs), &model), before);
    }

    #[test]
    fn extra_statements_never_add_violations(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = gen::generate(seed, &WIDE);
        let names = names_of(&g.file.annotations);
        let model = gen::model(seed ^ 0xabc, &names);
        let before = violation_keys(&g.ir, &model);
        let targeted = well_targeted(&g.ir, &model);
        let mut defs = g.file.annotations.clone();
        let all: Vec<(usize, usize)> =
            defs.iter().enumerate().flat_map(|(a, d)| (0..d.constraints.len()).map(move |c| (a, c))).collect();
        if all.is_empty() {
            return Ok(());
        }
        let (a, c) = all[pick.index(all.len())];
        let original = defs[a].constraints[c].clone();
        let scope = original.scope.map(|t| t.keyword());
        defs[a].constraints[c].statements.push(statement(seed, scope, &names));
        let after = violation_keys(&compile_defs(&defs), &model);
        for k in after {
            let Some(origin) = k.2 else { continue };
            let t = model.target_type(model.resolve(&k.0).unwrap());
            if origin == c
                && k.1 == defs[a].name
                && targeted.contains(&(k.0.clone(), k.1.clone()))
                && applies_to(&original, t)
            {
                prop_assert!(before.contains(&k), "{:?} became violated", k);
            }
        }
    }

    #[test]
    fn all_and_exists_agree_on_single_members(seed in any::<u64>()) {
        let st = statement(seed, Some("class"), &NAMES);
        let Some(t) = st.target else { return Ok(()) };
        let text = annlint::syntax::pretty::statement_text(&st);
        let decls: String = NAMES.iter().map(|n| format!("annotation {n} {{ }}\n")).collect();
        let src = format!("{decls}annotation Z {{ at class: require all {text}; at class: require {text}; }}");
        let ir = annlint::compiler::compile(&[parse_source("q.ann", &src).unwrap()]).unwrap().ir;
        let z = ir.get("Z").unwrap();
        let (every, some) = (&z.predicates[0].predicate, &z.predicates[1].predicate);
        let model = gen::model(seed, &NAMES);
        for c in 0..model.classifiers.len() {
            let el = ElementRef::Classifier(c);
            let of_kind = model.members(c).filter(|&m| model.target_type(m) == t).count();
            if of_kind == 1 {
                prop_assert_eq!(predicate_holds(every, &model, el), predicate_holds(some, &model, el));
            }
        }
    }
}

fn small_scope() -> Scope {
    common::equivalence_scope()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn finder_is_deterministic(seed in any::<u64>()) {
        let g = gen::generate(seed, &gen::SMALL);
        let scope = Scope::default();
        let a = find(&g.ir, &scope, &[]);
        let b = find(&g.ir, &scope, &[]);
        prop_assert_eq!(a.verdict(), b.verdict());
        prop_assert_eq!(a.witness(), b.witness());
    }

    #[test]
    fn pruning_never_changes_the_verdict(seed in any::<u64>()) {
        let g = gen::generate(seed, &gen::SMALL);
        let on = find(&g.ir, &small_scope(), &[]);
        let off = find(&g.ir, &Scope { pruning: false, ..small_scope() }, &[]);
        prop_assert_eq!(on.verdict(), off.verdict());
    }

    #[test]
    fn more_constraints_never_help(seed in any::<u64>()) {
        let g = gen::generate(seed, &gen::SMALL);
        let names = names_of(&g.file.annotations);
        let extra = gen::random_constraint(seed, &names);
        let src = g.source.replacen("{\n", &format!("{{\n    {extra}\n"), 1);
        let Ok(f) = parse_source("x.ann", &src) else { return Ok(()) };
        let Ok(tightened) = annlint::compiler::compile(&[f]) else { return Ok(()) };
        let widened = g.ir.annotations.iter().any(|a| {
            let now = &tightened.ir.get(&a.name).unwrap().allowed;
            now.iter().any(|t| !a.allowed.contains(t))
        });
        if widened {
            return Ok(());
        }
        let before = find(&g.ir, &small_scope(), &[]);
        let after = find(&tightened.ir, &small_scope(), &[]);
        prop_assert!(before.is_sat() || !after.is_sat(), "adding `{}` made\n{}satisfiable", extra, g.source);
    }
}

#[test]
fn grammar_tour_survives_printing() {
    let (f, _) = common::load("grammar_tour.ann");
    let again = parse_source("again.ann", &pretty_print(&f)).unwrap();
    let shape = |f: &annlint::syntax::ast::AnnSourceFile| {
        f.annotations
            .iter()
            .map(|a| {
                let attrs: Vec<_> = a.attributes.iter().map(|x| (x.name.clone(), x.kind.clone(), x.is_array, x.default.clone())).collect();
                let kinds: Vec<ConstraintKind> = a.constraints.iter().map(|c| c.kind).collect();
                (a.name.clone(), a.retention, attrs, kinds)
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(shape(&f), shape(&again));
    assert_eq!(f.package, again.package);
    let preds = |f: &annlint::syntax::ast::AnnSourceFile| {
        compile_defs(&f.annotations).annotations.into_iter().map(|a| (a.allowed, a.predicates)).collect::<Vec<_>>()
    };
    assert_eq!(preds(&f), preds(&again));
}
