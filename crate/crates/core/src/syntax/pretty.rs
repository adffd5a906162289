//! Canonical source rendering of an AST. Reparsing the output yields the
//! same tree (modulo spans).

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(file: &AnnSourceFile) -> String {
    let mut out = String::new();
    if let Some(p) = &file.package {
        let _ = writeln!(out, "package {p};\n");
    }
    for (i, a) in file.annotations.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        annotation(&mut out, a);
    }
    out
}

fn annotation(out: &mut String, a: &AnnotationDef) {
    let retention = match a.retention {
        Retention::Runtime => "runtime ",
        Retention::Class => "class ",
        Retention::Source => "source ",
        Retention::Unspecified => "",
    };
    let _ = writeln!(out, "{retention}annotation {} {{", a.name);
    for at in &a.attributes {
        let _ = write!(out, "    {}{} {}", at.kind.keyword(), if at.is_array { "[]" } else { "" }, at.name);
        if let Some(d) = &at.default {
            out.push_str(" = ");
            value(out, d);
        }
        out.push_str(";\n");
    }
    if !a.attributes.is_empty() && !a.constraints.is_empty() {
        out.push('\n');
    }
    for c in &a.constraints {
        out.push_str("    ");
        out.push_str(&constraint_text(c));
        out.push('\n');
    }
    out.push_str("}\n");
}

/// One constraint in source form, terminated by `;`.
pub fn constraint_text(c: &ConstraintDef) -> String {
    let mut s = String::new();
    if let Some(scope) = c.scope {
        let _ = write!(s, "at {scope}: ");
    }
    s.push_str(c.kind.keyword());
    if c.all {
        s.push_str(" all");
    }
    let sep = format!(" {} ", c.kind.joiner());
    let stmts: Vec<String> = c.statements.iter().map(statement_text).collect();
    s.push(' ');
    s.push_str(&stmts.join(&sep));
    s.push(';');
    s
}

pub fn statement_text(st: &Statement) -> String {
    let mut words: Vec<String> = Vec::new();
    if let Some(a) = &st.ann_ref {
        words.push(format!("@{a}"));
    }
    words.extend(st.modifiers.words().into_iter().map(str::to_string));
    if let Some(t) = st.target {
        words.push(t.keyword().to_string());
    }
    words.join(" ")
}

pub fn value_text(v: &DefaultValue) -> String {
    let mut s = String::new();
    value(&mut s, v);
    s
}

fn value(out: &mut String, v: &DefaultValue) {
    match v {
        DefaultValue::ClassLiteral(t) => {
            let _ = write!(out, "{t}.class");
        }
        DefaultValue::Str(s) => quoted(out, s, '"'),
        DefaultValue::Integer(i) => {
            let _ = write!(out, "{i}");
        }
        DefaultValue::Real(r) => out.push_str(r),
        DefaultValue::Character(c) => quoted(out, &c.to_string(), '\''),
        DefaultValue::Boolean(b) => {
            let _ = write!(out, "{b}");
        }
        DefaultValue::EnumRef(t, c) => {
            let _ = write!(out, "{t}.{c}");
        }
        DefaultValue::AnnLiteral { name, args } => {
            let _ = write!(out, "@{name}");
            match args {
                AnnArgs::None => {}
                AnnArgs::Single(v) => {
                    out.push('(');
                    value(out, v);
                    out.push(')');
                }
                AnnArgs::Pairs(pairs) => {
                    out.push('(');
                    for (i, (k, v)) in pairs.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        let _ = write!(out, "{k} = ");
                        value(out, v);
                    }
                    out.push(')');
                }
            }
        }
        DefaultValue::Array(items) => {
            out.push('{');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                value(out, v);
            }
            out.push('}');
        }
    }
}

fn quoted(out: &mut String, s: &str, q: char) {
    out.push(q);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c == q => {
                out.push('\\');
                out.push(c);
            }
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push(q);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_source;

    #[test]
    fn round_trips_a_mixed_file() {
        let src = "package a.b;\nsource annotation X { char c = '\\n'; String s = \"q\\\"\\u0001\"; Y[] ys = {@Y(k = Z.V), @Y}; \
                   at method: require @X public final static class or interface; forbid @Q and private method; }\nannotation Q {}";
        let f = parse_source("x.ann", src).unwrap();
        let printed = pretty_print(&f);
        let g = parse_source("x.ann", &printed).unwrap();
        assert_eq!(f.without_spans(), g.without_spans(), "{printed}");
    }

    #[test]
    fn statement_rendering() {
        let f = parse_source("x.ann", "annotation A { at class: require all @B protected abstract method; }").unwrap();
        assert_eq!(constraint_text(&f.annotations[0].constraints[0]), "at class: require all @B protected abstract method;");
    }
}
