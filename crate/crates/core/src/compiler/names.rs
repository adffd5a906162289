//! Stable predicate names derived from constraint text.

use crate::syntax::ast::{ConstraintDef, Statement};

/// `[at_<scope>__]<require|forbid>[_all]_<statement>(_<or|and>_<statement>)*`
/// where a statement reads `[ann<Name>_][<modifiers>_]<type>`.
pub fn predicate_name(c: &ConstraintDef) -> String {
    let mut name = String::new();
    if let Some(scope) = c.scope {
        name.push_str("at_");
        name.push_str(scope.keyword());
        name.push_str("__");
    }
    name.push_str(c.kind.keyword());
    if c.all {
        name.push_str("_all");
    }
    let sep = format!("_{}_", c.kind.joiner());
    let parts: Vec<String> = c.statements.iter().map(statement_descriptor).collect();
    name.push('_');
    name.push_str(&parts.join(&sep));
    name
}

pub fn statement_descriptor(s: &Statement) -> String {
    let mut words: Vec<String> = Vec::new();
    if let Some(a) = &s.ann_ref {
        words.push(format!("ann{a}"));
    }
    words.extend(s.modifiers.words().into_iter().map(str::to_string));
    if let Some(t) = s.target {
        words.push(t.keyword().to_string());
    }
    words.join("_")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_source;

    fn names(src: &str) -> Vec<String> {
        let f = parse_source("t.ann", src).unwrap();
        f.annotations[0].constraints.iter().map(predicate_name).collect()
    }

    #[test]
    fn naming_scheme() {
        assert_eq!(
            names(
                "annotation E { at class: require public constructor or protected constructor; \
                 require @P package class; at class: require all static final method; forbid final class; }"
            ),
            vec![
                "at_class__require_public_constructor_or_protected_constructor",
                "require_annP_package_class",
                "at_class__require_all_final_static_method",
                "forbid_final_class",
            ]
        );
    }
}
