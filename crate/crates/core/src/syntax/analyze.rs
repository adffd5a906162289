//! Semantic checks over a set of parsed files.

use std::collections::{HashMap, HashSet};

use super::ast::*;
use crate::diag::Diagnostic;

/// Checks a file set that forms one compilation unit. `@Name` references
/// resolve across the whole set.
pub fn analyze(files: &[AnnSourceFile]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut defined: HashMap<&str, &str> = HashMap::new();
    for f in files {
        for a in &f.annotations {
            if let Some(prev) = defined.insert(&a.name, &f.source_path) {
                out.push(Diagnostic::error(
                    "duplicate-annotation",
                    &f.source_path,
                    a.span,
                    format!("annotation `{}` is already defined in {prev}", a.name),
                ));
            }
        }
    }
    for f in files {
        for a in &f.annotations {
            check_annotation(&f.source_path, a, &defined, &mut out);
        }
    }
    out
}

fn check_annotation(path: &str, a: &AnnotationDef, defined: &HashMap<&str, &str>, out: &mut Vec<Diagnostic>) {
    let mut names = HashSet::new();
    for at in &a.attributes {
        if !names.insert(at.name.as_str()) {
            out.push(Diagnostic::error(
                "duplicate-attribute",
                path,
                at.span,
                format!("attribute `{}` declared twice in `{}`", at.name, a.name),
            ));
        }
        if let Some(d) = &at.default {
            check_default(path, at, d, out);
        }
    }
    for c in &a.constraints {
        for s in &c.statements {
            check_statement(path, c, s, defined, out);
        }
    }
}

fn check_statement(
    path: &str,
    c: &ConstraintDef,
    s: &Statement,
    defined: &HashMap<&str, &str>,
    out: &mut Vec<Diagnostic>,
) {
    if let (Some(scope), Some(t)) = (c.scope, s.target) {
        if scope.is_member() && !matches!(t, TargetType::Class | TargetType::Interface | TargetType::Annotation) {
            out.push(Diagnostic::error(
                "scope-owner",
                path,
                s.span,
                format!("statements under `at {scope}:` describe the enclosing type and must target class, interface or annotation, not {t}"),
            ));
        }
        if scope.is_container() && t.is_container() {
            out.push(Diagnostic::error(
                "scope-member",
                path,
                s.span,
                format!("statements under `at {scope}:` describe members and must target method, field or constructor, not {t}"),
            ));
        }
    }
    if s.target == Some(TargetType::Field) && s.modifiers.is_abstract {
        out.push(Diagnostic::error("abstract-field", path, s.span, "fields cannot be abstract"));
    }
    if let Some(r) = &s.ann_ref {
        if !defined.contains_key(r.as_str()) {
            out.push(Diagnostic::warning(
                "unknown-annotation",
                path,
                s.span,
                format!("@{r} is not defined in this file set; treating it as external"),
            ));
        }
    }
}

fn mismatch(path: &str, at: &AttributeDef, found: &DefaultValue, out: &mut Vec<Diagnostic>) {
    out.push(Diagnostic::error(
        "default-kind",
        path,
        at.span,
        format!(
            "default for `{}{} {}` cannot be a {}",
            at.kind.keyword(),
            if at.is_array { "[]" } else { "" },
            at.name,
            found.variant()
        ),
    ));
}

fn check_default(path: &str, at: &AttributeDef, d: &DefaultValue, out: &mut Vec<Diagnostic>) {
    match d {
        DefaultValue::Array(items) => {
            if !at.is_array {
                mismatch(path, at, d, out);
                return;
            }
            if let Some(first) = items.first() {
                if items.iter().any(|v| v.variant() != first.variant()) {
                    out.push(Diagnostic::error(
                        "default-kind",
                        path,
                        at.span,
                        format!("array default for `{}` mixes element kinds", at.name),
                    ));
                }
            }
            for v in items {
                check_scalar(path, at, v, out);
            }
        }
        v => check_scalar(path, at, v, out),
    }
}

fn check_scalar(path: &str, at: &AttributeDef, v: &DefaultValue, out: &mut Vec<Diagnostic>) {
    let range = |lo: i64, hi: i64| matches!(v, DefaultValue::Integer(i) if (lo..=hi).contains(i));
    let ok = match &at.kind {
        AttrKind::ClassRef => matches!(v, DefaultValue::ClassLiteral(_)),
        AttrKind::String => matches!(v, DefaultValue::Str(_)),
        AttrKind::Long => matches!(v, DefaultValue::Integer(_)),
        AttrKind::Int => range(i32::MIN.into(), i32::MAX.into()),
        AttrKind::Short => range(i16::MIN.into(), i16::MAX.into()),
        AttrKind::Byte => range(i8::MIN.into(), i8::MAX.into()),
        AttrKind::Float => match v {
            DefaultValue::Real(r) => DefaultValue::real_value(r).abs() <= f32::MAX as f64,
            DefaultValue::Integer(_) => true,
            _ => false,
        },
        AttrKind::Double => matches!(v, DefaultValue::Real(_) | DefaultValue::Integer(_)),
        AttrKind::Char => matches!(v, DefaultValue::Character(c) if (*c as u32) <= 0xFFFF),
        AttrKind::Boolean => matches!(v, DefaultValue::Boolean(_)),
        AttrKind::External(ty) => match v {
            DefaultValue::EnumRef(t, _) => t == ty,
            DefaultValue::AnnLiteral { name, .. } => name == ty,
            _ => false,
        },
    };
    if !ok {
        let in_range_issue = matches!(v, DefaultValue::Integer(_) | DefaultValue::Real(_) | DefaultValue::Character(_))
            && matches!(at.kind, AttrKind::Int | AttrKind::Short | AttrKind::Byte | AttrKind::Float | AttrKind::Char);
        if in_range_issue && kind_accepts_variant(&at.kind, v) {
            out.push(Diagnostic::error(
                "default-range",
                path,
                at.span,
                format!("default for `{}` is out of range for {}", at.name, at.kind.keyword()),
            ));
        } else {
            mismatch(path, at, v, out);
        }
    }
    if let DefaultValue::AnnLiteral { args: AnnArgs::Pairs(pairs), .. } = v {
        let mut keys = HashSet::new();
        for (k, _) in pairs {
            if !keys.insert(k.as_str()) {
                out.push(Diagnostic::error(
                    "duplicate-key",
                    path,
                    at.span,
                    format!("key `{k}` repeated in annotation literal"),
                ));
            }
        }
    }
}

fn kind_accepts_variant(kind: &AttrKind, v: &DefaultValue) -> bool {
    match kind {
        AttrKind::Int | AttrKind::Short | AttrKind::Byte => matches!(v, DefaultValue::Integer(_)),
        AttrKind::Float => matches!(v, DefaultValue::Real(_)),
        AttrKind::Char => matches!(v, DefaultValue::Character(_)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_source;

    fn codes(src: &str) -> Vec<&'static str> {
        let f = parse_source("t.ann", src).expect("parses");
        analyze(&[f]).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn contained_scope_must_reference_containers() {
        assert_eq!(codes("annotation A { at field: require final method; }"), vec!["scope-owner"]);
        assert!(codes("annotation A { at field: require public class or interface; }").is_empty());
    }

    #[test]
    fn container_scope_must_reference_members() {
        assert_eq!(codes("annotation A { at class: forbid final class; }"), vec!["scope-member"]);
        assert!(codes("annotation A { at interface: require all public method; }").is_empty());
    }

    #[test]
    fn default_kinds() {
        assert_eq!(codes("annotation A { int age = \"x\"; }"), vec!["default-kind"]);
        assert_eq!(codes("annotation A { byte b = 200; }"), vec!["default-range"]);
        assert_eq!(codes("annotation A { char c = 1; }"), vec!["default-kind"]);
        assert_eq!(codes("annotation A { int x = {1, 2}; }"), vec!["default-kind"]);
        assert_eq!(codes("annotation A { String[] x = {\"a\", 1}; }"), vec!["default-kind", "default-kind"]);
        assert_eq!(codes("annotation A { Color c = Shade.RED; }"), vec!["default-kind"]);
        assert!(codes("annotation A { double d = 2; int[] xs = 3; short s = -32768; }").is_empty());
    }

    #[test]
    fn duplicates_and_fields() {
        assert_eq!(codes("annotation A { int x; long x; }"), vec!["duplicate-attribute"]);
        assert_eq!(codes("annotation A { require abstract field; }"), vec!["abstract-field"]);
        assert_eq!(codes("annotation A { X x = @X(k = 1, k = 2); }"), vec!["duplicate-key"]);
    }

    #[test]
    fn unknown_reference_is_a_warning() {
        let f = parse_source("t.ann", "annotation A { require @B class; }").unwrap();
        let d = analyze(&[f]);
        assert_eq!(d.len(), 1);
        assert!(!d[0].is_error());
    }

    #[test]
    fn references_resolve_across_files() {
        let a = parse_source("a.ann", "annotation A { require @B class; }").unwrap();
        let b = parse_source("b.ann", "annotation B { }").unwrap();
        assert!(analyze(&[a.clone(), b]).is_empty());
        let dup = parse_source("c.ann", "annotation A { }").unwrap();
        assert_eq!(analyze(&[a, dup]).iter().filter(|d| d.code == "duplicate-annotation").count(), 1);
    }
}
