//! Java `@interface` declarations.

use std::fmt::Write;

use super::{CodegenError, GeneratedUnit};
use crate::compiler::compile_defs;
use crate::syntax::ast::{AnnArgs, AnnotationDef, AttrKind, AttributeDef, DefaultValue, Retention, TargetType};
use crate::syntax::pretty::value_text;

fn element_type(t: TargetType) -> &'static str {
    match t {
        TargetType::Class | TargetType::Interface | TargetType::Annotation | TargetType::Enum => "TYPE",
        TargetType::Field => "FIELD",
        TargetType::Method => "METHOD",
        TargetType::Constructor => "CONSTRUCTOR",
    }
}

fn java_type(a: &AttributeDef) -> String {
    let base = match &a.kind {
        AttrKind::ClassRef => "Class<?>",
        other => other.keyword(),
    };
    if a.is_array {
        format!("{base}[]")
    } else {
        base.to_string()
    }
}

fn names_type(v: &DefaultValue, ty: &str) -> bool {
    match v {
        DefaultValue::EnumRef(t, _) => t == ty,
        DefaultValue::AnnLiteral { name, .. } => name == ty,
        DefaultValue::Array(items) => items.iter().any(|i| names_type(i, ty)),
        _ => false,
    }
}

/// Java literal for a default, given the declared element kind.
fn java_value(v: &DefaultValue, kind: &AttrKind) -> String {
    match (v, kind) {
        (DefaultValue::Real(r), AttrKind::Float) => {
            format!("{}f", r.trim_end_matches(['f', 'F', 'd', 'D']))
        }
        (DefaultValue::Integer(i), AttrKind::Long) => format!("{i}L"),
        (DefaultValue::Array(items), _) => {
            let parts: Vec<String> = items.iter().map(|i| java_value(i, kind)).collect();
            format!("{{{}}}", parts.join(", "))
        }
        (DefaultValue::AnnLiteral { name, args: AnnArgs::None }, _) => format!("@{name}"),
        _ => value_text(v),
    }
}

/// Renders the annotation type. `known` lists the annotation names defined
/// alongside `def`, which resolve external attribute types.
pub fn gen_annotation_type(def: &AnnotationDef, package: &str, known: &[String]) -> Result<GeneratedUnit, CodegenError> {
    for a in &def.attributes {
        if let AttrKind::External(ty) = &a.kind {
            let resolved = known.contains(ty) || a.default.as_ref().is_some_and(|d| names_type(d, ty));
            if !resolved {
                return Err(CodegenError::UnresolvedType {
                    annotation: def.name.clone(),
                    attribute: a.name.clone(),
                    ty: ty.clone(),
                });
            }
        }
    }
    let ir = compile_defs(std::slice::from_ref(def));
    let compiled = &ir.annotations[0];
    let mut targets: Vec<&str> = Vec::new();
    if compiled.explicit_targets {
        for &t in &compiled.allowed {
            let e = element_type(t);
            if !targets.contains(&e) {
                targets.push(e);
            }
        }
    }
    let retention = match def.retention {
        Retention::Runtime => Some("RUNTIME"),
        Retention::Class => Some("CLASS"),
        Retention::Source => Some("SOURCE"),
        Retention::Unspecified => None,
    };

    let mut s = String::new();
    let _ = writeln!(s, "package {package};\n");
    if !targets.is_empty() || retention.is_some() {
        s.push_str("import java.lang.annotation.*;\n\n");
    }
    match targets.as_slice() {
        [] => {}
        [one] => {
            let _ = writeln!(s, "@Target(ElementType.{one})");
        }
        many => {
            let list: Vec<String> = many.iter().map(|t| format!("ElementType.{t}")).collect();
            let _ = writeln!(s, "@Target({{{}}})", list.join(", "));
        }
    }
    if let Some(r) = retention {
        let _ = writeln!(s, "@Retention(RetentionPolicy.{r})");
    }
    if def.attributes.is_empty() {
        let _ = writeln!(s, "public @interface {} {{ }}", def.name);
    } else {
        let _ = writeln!(s, "public @interface {} {{", def.name);
        for a in &def.attributes {
            let _ = write!(s, "    {} {}()", java_type(a), a.name);
            if let Some(d) = &a.default {
                let _ = write!(s, " default {}", java_value(d, &a.kind));
            }
            s.push_str(";\n");
        }
        s.push_str("}\n");
    }
    Ok(GeneratedUnit { relative_path: super::unit_path(package, &def.name), contents: s })
}
