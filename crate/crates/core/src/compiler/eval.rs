//! Evaluation of compiled predicates against a program model.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{AnnotationIR, ConstraintIR, ElementTest, Polarity, Predicate};
use crate::model::{ElementPath, ElementRef, ProgramModel};
use crate::syntax::ast::TargetType;

/// Name used for violations of the allowed-target set.
pub const TARGET_PREDICATE: &str = "target";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub target: ElementPath,
    pub ann: String,
    /// Predicate name, or `target` for a disallowed target kind.
    pub predicate: String,
    /// Index of the originating constraint; `None` for target violations.
    pub origin: Option<usize>,
    pub description: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("annotation @{ann} on `{target}` is neither defined nor referenced by the annotation set")]
    UnknownAnnotation { ann: String, target: String },
    #[error("annotation @{ann} targets missing element `{target}`")]
    UnresolvedTarget { ann: String, target: String },
}

/// All violations in the model. Fails on annotation uses the set knows
/// nothing about.
pub fn evaluate(ir: &ConstraintIR, model: &ProgramModel) -> Result<Vec<Violation>, EvalError> {
    let (violations, unknown) = evaluate_lenient(ir, model)?;
    if let Some((ann, target)) = unknown.into_iter().next() {
        return Err(EvalError::UnknownAnnotation { ann, target: target.to_string() });
    }
    Ok(violations)
}

/// Like [`evaluate`], but returns unknown annotation uses instead of failing.
pub fn evaluate_lenient(
    ir: &ConstraintIR,
    model: &ProgramModel,
) -> Result<(Vec<Violation>, BTreeSet<(String, ElementPath)>), EvalError> {
    let mut out = Vec::new();
    let mut unknown = BTreeSet::new();
    for u in &model.annotation_uses {
        let Some(el) = model.resolve(&u.target) else {
            return Err(EvalError::UnresolvedTarget { ann: u.ann.clone(), target: u.target.to_string() });
        };
        match ir.get(&u.ann) {
            Some(a) => out.extend(violations_at(a, model, el)),
            None if ir.external.contains(&u.ann) => {}
            None => {
                unknown.insert((u.ann.clone(), u.target.clone()));
            }
        }
    }
    Ok((out, unknown))
}

/// Violations of annotation `a` placed on `el`.
pub fn violations_at(a: &AnnotationIR, model: &ProgramModel, el: ElementRef) -> Vec<Violation> {
    let mut out = Vec::new();
    let t = model.target_type(el);
    if !a.allows(t) {
        let allowed: Vec<&str> = a.allowed.iter().map(|t| t.keyword()).collect();
        out.push(Violation {
            target: model.path(el),
            ann: a.name.clone(),
            predicate: TARGET_PREDICATE.to_string(),
            origin: None,
            description: format!("@{} may only target {}, not {t}", a.name, allowed.join(" or ")),
        });
    }
    for p in &a.predicates {
        if !predicate_holds(&p.predicate, model, el) {
            out.push(Violation {
                target: model.path(el),
                ann: a.name.clone(),
                predicate: p.name.clone(),
                origin: Some(p.origin),
                description: p.predicate.describe(),
            });
        }
    }
    out
}

fn applies(scope: Option<TargetType>, t: TargetType) -> bool {
    scope.is_none_or(|s| s == t)
}

fn carries(model: &ProgramModel, el: ElementRef, ann: &Option<String>) -> bool {
    ann.as_deref().is_none_or(|a| model.carries(el, a))
}

/// Members of the classifier `c` matching `test`; a bare test is checked
/// against the annotated element itself.
fn member_witness(model: &ProgramModel, el: ElementRef, c: usize, test: &ElementTest) -> bool {
    if test.is_bare() {
        return carries(model, el, &test.co_ann);
    }
    model.members(c).any(|m| test.holds(model, m))
}

fn owner_match(model: &ProgramModel, el: ElementRef, test: &ElementTest) -> bool {
    if test.is_bare() {
        return carries(model, el, &test.co_ann);
    }
    match el.owner() {
        Some(o) => test.holds(model, ElementRef::Classifier(o)),
        None => false,
    }
}

/// Whether predicate `p` is satisfied for a use on `el`. Predicates whose
/// scope differs from the element's type hold vacuously.
pub fn predicate_holds(p: &Predicate, model: &ProgramModel, el: ElementRef) -> bool {
    let t = model.target_type(el);
    match p {
        Predicate::TargetCondition { disjuncts } => {
            let mut applicable = disjuncts.iter().filter(|d| d.target.is_none_or(|x| x == t)).peekable();
            applicable.peek().is_none() || applicable.any(|d| d.holds(model, el))
        }
        Predicate::ForbiddenTargetCondition { conjuncts } => !conjuncts.iter().all(|c| c.holds(model, el)),
        Predicate::SameElementCoOccurrence { scope, anns, polarity } => {
            if !applies(*scope, t) {
                return true;
            }
            match polarity {
                Polarity::Require => anns.iter().any(|a| model.carries(el, a)),
                Polarity::Forbid => !anns.iter().all(|a| model.carries(el, a)),
            }
        }
        Predicate::MemberExists { scope, disjuncts } => {
            let ElementRef::Classifier(c) = el else { return true };
            if *scope != t {
                return true;
            }
            disjuncts.iter().any(|d| member_witness(model, el, c, d))
        }
        Predicate::MemberForAll { scope, disjuncts } => {
            let ElementRef::Classifier(c) = el else { return true };
            if *scope != t {
                return true;
            }
            disjuncts.iter().any(|d| match d.target {
                None => carries(model, el, &d.co_ann),
                Some(mt) => model.members(c).filter(|&m| model.target_type(m) == mt).all(|m| d.holds(model, m)),
            })
        }
        Predicate::MemberForbidden { scope, conjuncts } => {
            let ElementRef::Classifier(c) = el else { return true };
            if *scope != t {
                return true;
            }
            !conjuncts.iter().all(|d| member_witness(model, el, c, d))
        }
        Predicate::OwnerCondition { scope, tests, polarity } => {
            if *scope != t {
                return true;
            }
            match polarity {
                Polarity::Require => tests.iter().any(|d| owner_match(model, el, d)),
                Polarity::Forbid => !tests.iter().all(|d| owner_match(model, el, d)),
            }
        }
    }
}
