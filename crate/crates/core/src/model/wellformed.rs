//! Built-in well-formedness rules of the program model.

use std::collections::BTreeMap;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{ClassifierKind, ProgramModel, Visibility};

/// The closed set of built-in rules, numbered 1 to 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WfRule {
    /// Top-level classifiers are public or package-private.
    TopLevelVisibility = 1,
    /// Abstract methods live in abstract classes, interfaces or annotation types.
    AbstractMethodOwner = 2,
    /// No cycles through `extends` / `implements`.
    InheritanceCycle = 3,
    /// Interfaces and annotation types have no constructor.
    InterfaceConstructor = 4,
    /// Constructors are neither abstract nor static and are named after their owner.
    ConstructorShape = 5,
    /// At most one use of an annotation per element.
    RepeatedAnnotation = 6,
}

impl WfRule {
    pub fn code(self) -> &'static str {
        match self {
            WfRule::TopLevelVisibility => "wf/visibility",
            WfRule::AbstractMethodOwner => "wf/abstract-method",
            WfRule::InheritanceCycle => "wf/inheritance-cycle",
            WfRule::InterfaceConstructor => "wf/interface-constructor",
            WfRule::ConstructorShape => "wf/constructor",
            WfRule::RepeatedAnnotation => "wf/repeated-annotation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDiagnostic {
    pub rule: WfRule,
    pub path: String,
    pub message: String,
}

impl fmt::Display for ModelDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error[{}]: {}", self.path, self.rule.code(), self.message)
    }
}

/// Returns one diagnostic per violation of rules 1-6; empty iff the model
/// is well formed. Expects references to resolve (see `validate_structure`).
pub fn well_formed(model: &ProgramModel) -> Vec<ModelDiagnostic> {
    let mut out = Vec::new();
    let mut push = |rule, path: String, message: String| out.push(ModelDiagnostic { rule, path, message });

    for c in &model.classifiers {
        if !matches!(c.visibility, Visibility::Public | Visibility::Package) {
            push(
                WfRule::TopLevelVisibility,
                c.name.clone(),
                format!("top-level {} `{}` cannot be {}", c.kind.java_keyword(), c.name, c.visibility),
            );
        }
        let container_abstract = c.effective_abstract();
        for m in &c.methods {
            let path = format!("{}#method:{}", c.name, m.name);
            if m.is_abstract && !container_abstract {
                push(
                    WfRule::AbstractMethodOwner,
                    path.clone(),
                    format!("abstract method `{}` in non-abstract `{}`", m.name, c.name),
                );
            }
            if m.is_constructor {
                if matches!(c.kind, ClassifierKind::Interface | ClassifierKind::Annotation) {
                    push(
                        WfRule::InterfaceConstructor,
                        path.clone(),
                        format!("{} `{}` cannot declare a constructor", c.kind.java_keyword(), c.name),
                    );
                }
                if m.is_abstract || m.is_static || m.name != c.name {
                    push(
                        WfRule::ConstructorShape,
                        path,
                        "constructors must be named after their class and be neither abstract nor static".to_string(),
                    );
                }
            }
        }
    }

    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..model.classifiers.len()).map(|i| graph.add_node(i)).collect();
    for (i, c) in model.classifiers.iter().enumerate() {
        for sup in c.extends.iter().chain(&c.implements) {
            if let Some(j) = model.classifier(sup) {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut cycles: Vec<Vec<String>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || graph.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let mut names: Vec<String> = scc.iter().map(|&n| model.classifiers[graph[n]].name.clone()).collect();
            names.sort();
            names
        })
        .collect();
    cycles.sort();
    for names in cycles {
        push(WfRule::InheritanceCycle, names[0].clone(), format!("inheritance cycle through {}", names.join(", ")));
    }

    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    for u in &model.annotation_uses {
        *counts.entry((u.target.to_string(), u.ann.clone())).or_default() += 1;
    }
    for ((path, ann), n) in counts {
        if n > 1 {
            push(WfRule::RepeatedAnnotation, path, format!("@{ann} applied {n} times to the same element"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;

    fn rules(m: &ProgramModel) -> Vec<WfRule> {
        well_formed(m).into_iter().map(|d| d.rule).collect()
    }

    #[test]
    fn empty_model_is_well_formed() {
        assert!(well_formed(&ProgramModel::default()).is_empty());
    }

    #[test]
    fn private_top_level_class() {
        let mut c = Classifier::new("A", ClassifierKind::Class);
        c.visibility = Visibility::Private;
        let m = ProgramModel { classifiers: vec![c], annotation_uses: vec![] };
        assert_eq!(rules(&m), vec![WfRule::TopLevelVisibility]);
    }

    #[test]
    fn two_class_cycle_is_one_diagnostic() {
        let mut a = Classifier::new("A", ClassifierKind::Class);
        a.extends = Some("B".into());
        let mut b = Classifier::new("B", ClassifierKind::Class);
        b.extends = Some("A".into());
        let m = ProgramModel { classifiers: vec![a, b], annotation_uses: vec![] };
        assert_eq!(rules(&m), vec![WfRule::InheritanceCycle]);
    }

    #[test]
    fn self_implementation_is_a_cycle() {
        let mut i = Classifier::new("I", ClassifierKind::Interface);
        i.implements = vec!["I".into()];
        let m = ProgramModel { classifiers: vec![i], annotation_uses: vec![] };
        assert_eq!(rules(&m), vec![WfRule::InheritanceCycle]);
    }

    #[test]
    fn constructor_rules() {
        let mut i = Classifier::new("I", ClassifierKind::Interface);
        i.methods.push(Method { is_constructor: true, ..Method::new("I") });
        let mut c = Classifier::new("C", ClassifierKind::Class);
        c.methods.push(Method { is_constructor: true, is_static: true, ..Method::new("C") });
        c.methods.push(Method { is_abstract: true, ..Method::new("m") });
        let m = ProgramModel { classifiers: vec![i, c], annotation_uses: vec![] };
        assert_eq!(
            rules(&m),
            vec![WfRule::InterfaceConstructor, WfRule::ConstructorShape, WfRule::AbstractMethodOwner]
        );
    }

    #[test]
    fn repeated_annotation() {
        let c = Classifier::new("C", ClassifierKind::Class);
        let p = ElementPath::Classifier("C".into());
        let m = ProgramModel {
            classifiers: vec![c],
            annotation_uses: vec![AnnotationUse::new("X", p.clone()), AnnotationUse::new("X", p.clone()), AnnotationUse::new("Y", p)],
        };
        assert_eq!(rules(&m), vec![WfRule::RepeatedAnnotation]);
    }

    #[test]
    fn abstract_methods_allowed_in_interfaces() {
        let mut i = Classifier::new("I", ClassifierKind::Interface);
        i.methods.push(Method { is_abstract: true, ..Method::new("m") });
        let m = ProgramModel { classifiers: vec![i], annotation_uses: vec![] };
        assert!(well_formed(&m).is_empty());
    }
}
