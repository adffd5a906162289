//! Java-like rendering of program models.
//!
//! Member types are not modeled: fields print as `int`, methods as `void`.

use std::fmt::Write;

use crate::model::{AnnotationUse, Classifier, ClassifierKind, ElementPath, ProgramModel, Visibility};

pub fn to_java_text(model: &ProgramModel) -> String {
    let mut out = String::new();
    for (i, c) in model.classifiers.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        classifier(&mut out, model, c);
    }
    out
}

fn annotations(out: &mut String, model: &ProgramModel, path: &ElementPath, indent: &str) {
    for u in model.annotation_uses.iter().filter(|u| &u.target == path) {
        out.push_str(indent);
        out.push_str(&annotation_text(u));
        out.push('\n');
    }
}

/// `@Name` or `@Name(key = value, ...)`.
pub fn annotation_text(u: &AnnotationUse) -> String {
    if u.values.is_empty() {
        return format!("@{}", u.ann);
    }
    let pairs: Vec<String> = u.values.iter().map(|(k, v)| format!("{k} = {}", json_value(v))).collect();
    format!("@{}({})", u.ann, pairs.join(", "))
}

fn json_value(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(json_value).collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn modifiers(vis: Visibility, is_abstract: bool, is_static: bool, is_final: bool) -> String {
    let mut s = String::new();
    if vis != Visibility::Package {
        s.push_str(vis.keyword());
        s.push(' ');
    }
    for (on, word) in [(is_abstract, "abstract"), (is_static, "static"), (is_final, "final")] {
        if on {
            s.push_str(word);
            s.push(' ');
        }
    }
    s
}

fn classifier(out: &mut String, model: &ProgramModel, c: &Classifier) {
    annotations(out, model, &ElementPath::Classifier(c.name.clone()), "");
    let _ = write!(
        out,
        "{}{} {}",
        modifiers(c.visibility, c.is_abstract, c.is_static, c.is_final),
        c.kind.java_keyword(),
        c.name
    );
    if let Some(sup) = &c.extends {
        let _ = write!(out, " extends {sup}");
    }
    if !c.implements.is_empty() {
        let word = if c.kind == ClassifierKind::Interface { "extends" } else { "implements" };
        let _ = write!(out, " {word} {}", c.implements.join(", "));
    }
    out.push_str(" {\n");
    for f in &c.fields {
        annotations(out, model, &ElementPath::Field(c.name.clone(), f.name.clone()), "    ");
        let _ = writeln!(out, "    {}int {};", modifiers(f.visibility, false, f.is_static, f.is_final), f.name);
    }
    for m in &c.methods {
        annotations(out, model, &ElementPath::Method(c.name.clone(), m.name.clone()), "    ");
        let mods = modifiers(m.visibility, m.is_abstract, m.is_static, m.is_final);
        if m.is_constructor {
            let _ = writeln!(out, "    {mods}{}() {{ ... }}", m.name);
        } else if m.is_abstract {
            let _ = writeln!(out, "    {mods}void {}();", m.name);
        } else {
            let _ = writeln!(out, "    {mods}void {}() {{ ... }}", m.name);
        }
    }
    out.push_str("}\n");
}
