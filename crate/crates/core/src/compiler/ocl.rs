//! USE/OCL rendering of a compiled annotation set.

use std::fmt::Write;

use super::{AnnotationIR, ConstraintIR, ElementTest, Multiplicity, Polarity, Predicate};
use crate::syntax::ast::{AttrKind, TargetType};

const PRELUDE: &str = "model AnnotatedJava

enum Visibility { public, protected, package, private }

abstract class JavaElement
attributes
    visibility : Visibility
    isAbstract : Boolean
    isStatic : Boolean
    isFinal : Boolean
end

abstract class JavaClassifier < JavaElement
end

class JavaClass < JavaClassifier
end

class JavaInterface < JavaClassifier
end

class JavaAnnotationType < JavaClassifier
end

class JavaEnum < JavaClassifier
end

class JavaMethod < JavaElement
attributes
    isConstructor : Boolean
end

class JavaField < JavaElement
end

abstract class JavaAnnotation
end

association Annotation_target between
    JavaElement [0..1] role target
    JavaAnnotation [0..*] role annotations
end

association Classifier_methods between
    JavaClassifier [1..1] role owner
    JavaMethod [0..*] role methods
end

association Classifier_fields between
    JavaClassifier [1..1] role fieldOwner
    JavaField [0..*] role fields
end

association Classifier_extends between
    JavaClass [0..1] role superclass
    JavaClass [0..*] role subclasses
end

association Classifier_implements between
    JavaClassifier [0..*] role interfaces
    JavaClassifier [0..*] role implementors
end
";

/// Renders the whole set: base meta-model, one class per annotation with
/// its invariants, then one association per allowed target type.
pub fn emit_ocl(ir: &ConstraintIR) -> String {
    let mut out = String::from(PRELUDE);
    for a in &ir.annotations {
        out.push('\n');
        annotation_class(&mut out, ir, a);
    }
    for a in &ir.annotations {
        for (t, co) in &a.target_co_ann {
            let co = co.as_deref().map(|c| format!("ann{c}_")).unwrap_or_default();
            let card = if a.multiplicity == Multiplicity::ExactlyOne { "[1..1]" } else { "[0..1]" };
            let _ = write!(
                out,
                "\nassociation {name}_target_{co}{kw} between\n    {ty} {card} role {role}\n    {name} [0..*] role annotations{name}\nend\n",
                name = a.name,
                kw = t.keyword(),
                ty = meta_class(*t),
                role = role(&a.name, *t),
            );
        }
    }
    out
}

fn meta_class(t: TargetType) -> &'static str {
    match t {
        TargetType::Class => "JavaClass",
        TargetType::Interface => "JavaInterface",
        TargetType::Annotation => "JavaAnnotationType",
        TargetType::Enum => "JavaEnum",
        TargetType::Method | TargetType::Constructor => "JavaMethod",
        TargetType::Field => "JavaField",
    }
}

fn capitalized(t: TargetType) -> String {
    let k = t.keyword();
    k[..1].to_uppercase() + &k[1..]
}

fn role(ann: &str, t: TargetType) -> String {
    format!("target{ann}{}", capitalized(t))
}

fn attr_type(kind: &AttrKind) -> &'static str {
    match kind {
        AttrKind::ClassRef => "JavaClass",
        AttrKind::String | AttrKind::Char | AttrKind::External(_) => "String",
        AttrKind::Int | AttrKind::Long | AttrKind::Short | AttrKind::Byte => "Integer",
        AttrKind::Float | AttrKind::Double => "Real",
        AttrKind::Boolean => "Boolean",
    }
}

fn annotation_class(out: &mut String, ir: &ConstraintIR, a: &AnnotationIR) {
    let _ = writeln!(out, "class {} < JavaAnnotation", a.name);
    if !a.attributes.is_empty() {
        out.push_str("attributes\n");
        for at in &a.attributes {
            let ty = attr_type(&at.kind);
            if at.is_array {
                let _ = writeln!(out, "    {} : Sequence({ty})", at.name);
            } else {
                let _ = writeln!(out, "    {} : {ty}", at.name);
            }
        }
    }
    out.push_str("constraints\n    inv redefs : self.target.isUndefined()\n");
    for p in &a.predicates {
        if let Some(body) = invariant_body(ir, a, &p.predicate) {
            let _ = writeln!(out, "\n    -- {}", p.source);
            let _ = writeln!(out, "    inv {}:", p.name);
            for line in body.lines() {
                let _ = writeln!(out, "        {line}");
            }
        }
    }
    out.push_str("end\n");
}

/// Kind filter for a member collection element `e`.
fn member_filter(t: TargetType) -> Option<&'static str> {
    match t {
        TargetType::Constructor => Some("e.isConstructor=true"),
        TargetType::Method => Some("e.isConstructor=false"),
        _ => None,
    }
}

fn collection(t: TargetType) -> &'static str {
    if t == TargetType::Field {
        "fields"
    } else {
        "methods"
    }
}

/// Modifier and co-annotation conditions on expression `x`.
fn conditions(x: &str, d: &ElementTest) -> Vec<String> {
    let mut c = Vec::new();
    if let Some(v) = d.mods.visibility {
        c.push(format!("{x}.visibility=#{}", v.keyword()));
    }
    if d.mods.is_abstract == Some(true) {
        c.push(format!("{x}.isAbstract=true"));
    }
    if d.mods.is_static == Some(true) {
        c.push(format!("{x}.isStatic=true"));
    }
    if d.mods.is_final == Some(true) {
        c.push(format!("{x}.isFinal=true"));
    }
    if let Some(ann) = &d.co_ann {
        c.push(format!("{x}.annotations{ann}->notEmpty()"));
    }
    c
}

fn and_join(parts: Vec<String>) -> String {
    if parts.is_empty() {
        "true".to_string()
    } else {
        parts.join(" and ")
    }
}

fn block(items: &[String], op: &str) -> String {
    let lines: Vec<String> = items.iter().map(|i| format!("    ({i})")).collect();
    lines.join(&format!(" {op}\n"))
}

fn guarded(guard: &str, negate: bool, items: &[String], op: &str) -> String {
    let not = if negate { "not " } else { "" };
    format!("{guard}->notEmpty() implies {not}(\n{}\n)", block(items, op))
}

fn invariant_body(ir: &ConstraintIR, a: &AnnotationIR, p: &Predicate) -> Option<String> {
    let single = a.multiplicity == Multiplicity::ExactlyOne;
    match p {
        Predicate::TargetCondition { disjuncts } => {
            if disjuncts.iter().all(|d| d.mods.is_empty() && d.co_ann.is_none()) {
                return None;
            }
            let items: Vec<String> = disjuncts.iter().map(|d| target_disjunct(a, d, single)).collect();
            if single {
                return Some(block(&items, "or").trim_start().to_string());
            }
            let guards: Vec<String> = distinct_targets(disjuncts)
                .into_iter()
                .map(|t| format!("self.{}->notEmpty()", role(&a.name, t)))
                .collect();
            Some(format!("({}) implies (\n{}\n)", guards.join(" or "), block(&items, "or")))
        }
        Predicate::ForbiddenTargetCondition { conjuncts } => {
            let items: Vec<String> = conjuncts.iter().map(|d| target_disjunct(a, d, single)).collect();
            Some(format!("not (\n{}\n)", block(&items, "and")))
        }
        Predicate::SameElementCoOccurrence { scope, anns, polarity } => {
            let types: Vec<TargetType> = match scope {
                Some(s) => vec![*s],
                None => a.allowed.clone(),
            };
            let per_type: Vec<String> = types
                .iter()
                .map(|&t| {
                    let r = format!("self.{}", role(&a.name, t));
                    let checks: Vec<String> = anns.iter().map(|x| format!("{r}.annotations{x}->notEmpty()")).collect();
                    match polarity {
                        Polarity::Require => format!("{r}->notEmpty() implies ({})", checks.join(" or ")),
                        Polarity::Forbid => format!("{r}->notEmpty() implies not ({})", checks.join(" and ")),
                    }
                })
                .collect();
            Some(block(&per_type, "and").trim_start().to_string())
        }
        Predicate::MemberExists { scope, disjuncts } => {
            let r = format!("self.{}", role(&a.name, *scope));
            let items: Vec<String> = disjuncts.iter().map(|d| member_exists(&r, d)).collect();
            Some(guarded(&r, false, &items, "or"))
        }
        Predicate::MemberForAll { scope, disjuncts } => {
            let r = format!("self.{}", role(&a.name, *scope));
            let items: Vec<String> = disjuncts
                .iter()
                .map(|d| match d.target {
                    None => and_join(conditions(&r, d)),
                    Some(t) => {
                        let cond = and_join(conditions("e", d));
                        match member_filter(t) {
                            Some(f) => format!("{r}.{}->forAll(e | {f} implies ({cond}))", collection(t)),
                            None => format!("{r}.{}->forAll(e | {cond})", collection(t)),
                        }
                    }
                })
                .collect();
            Some(guarded(&r, false, &items, "or"))
        }
        Predicate::MemberForbidden { scope, conjuncts } => {
            let r = format!("self.{}", role(&a.name, *scope));
            let items: Vec<String> = conjuncts.iter().map(|d| member_exists(&r, d)).collect();
            Some(guarded(&r, true, &items, "and"))
        }
        Predicate::OwnerCondition { scope, tests, polarity } => {
            let r = format!("self.{}", role(&a.name, *scope));
            let items: Vec<String> = tests.iter().map(|d| owner_test(ir, &r, d)).collect();
            Some(match polarity {
                Polarity::Require => guarded(&r, false, &items, "or"),
                Polarity::Forbid => guarded(&r, true, &items, "and"),
            })
        }
    }
}

fn distinct_targets(tests: &[ElementTest]) -> Vec<TargetType> {
    let mut out = Vec::new();
    for t in tests.iter().filter_map(|d| d.target) {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

fn target_disjunct(a: &AnnotationIR, d: &ElementTest, single: bool) -> String {
    match d.target {
        Some(t) => {
            let r = format!("self.{}", role(&a.name, t));
            let cond = and_join(conditions(&r, d));
            if single {
                cond
            } else {
                format!("{r}->notEmpty() and {cond}")
            }
        }
        None => {
            let per: Vec<String> = a
                .allowed
                .iter()
                .map(|&t| and_join(conditions(&format!("self.{}", role(&a.name, t)), d)))
                .collect();
            per.join(" or ")
        }
    }
}

fn member_exists(r: &str, d: &ElementTest) -> String {
    match d.target {
        None => and_join(conditions(r, d)),
        Some(t) => {
            let mut parts: Vec<String> = member_filter(t).map(str::to_string).into_iter().collect();
            parts.extend(conditions("e", d));
            format!("{r}.{}->exists(e | {})", collection(t), and_join(parts))
        }
    }
}

fn owner_test(ir: &ConstraintIR, r: &str, d: &ElementTest) -> String {
    let Some(t) = d.target else {
        return and_join(conditions(r, d));
    };
    let owner = format!("{r}.owner");
    if let Some(other) = d.co_ann.as_deref().and_then(|n| ir.get(n)).filter(|o| o.allows(t)) {
        let tr = format!("e.{}", role(&other.name, t));
        let plain = ElementTest { co_ann: None, ..d.clone() };
        let mut parts = vec![format!("{tr} = {owner}")];
        parts.extend(conditions(&tr, &plain));
        return format!("{}.allInstances()->exists(e | {})", other.name, parts.join(" and "));
    }
    let mut parts = vec![format!("{owner}.oclIsTypeOf({})", meta_class(t))];
    parts.extend(conditions(&owner, d));
    parts.join(" and ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile;
    use crate::syntax::parse_source;

    fn ocl(src: &str) -> String {
        emit_ocl(&compile(&[parse_source("t.ann", src).unwrap()]).unwrap().ir)
    }

    #[test]
    fn person_employee_invariants() {
        let text = ocl("annotation Person { require public class; at class: forbid final field; } \
                        annotation Employee { require @Person package class; }");
        assert!(text.contains("inv require_public_class:"));
        assert!(text.contains("self.targetPersonClass.visibility=#public"));
        assert!(text.contains("inv at_class__forbid_final_field:"));
        assert!(text.contains("self.targetPersonClass.fields->exists(e | e.isFinal=true)"));
        assert!(text.contains("inv require_annPerson_package_class:"));
        assert!(text.contains("association Employee_target_annPerson_class between"));
    }

    #[test]
    fn empty_annotation_has_only_redefs() {
        let text = ocl("annotation E {}");
        let start = text.find("class E < JavaAnnotation").unwrap();
        let end = start + text[start..].find("\nend\n").unwrap();
        let class_block = &text[start..end];
        assert_eq!(class_block.matches("inv ").count(), 1);
        assert!(class_block.contains("inv redefs : self.target.isUndefined()"));
        assert_eq!(text.matches("role annotationsE").count(), 7);
    }

    #[test]
    fn output_is_byte_stable() {
        let src = "annotation A { require method or field; at method: forbid @B static class; } annotation B {}";
        assert_eq!(ocl(src), ocl(src));
    }
}
