//! Lowering of Ann constraints into predicates over program models.

mod eval;
mod names;
mod ocl;

use std::collections::BTreeSet;
use std::fmt;

use crate::diag::{has_errors, Diagnostic};
use crate::model::{ElementRef, ProgramModel, Visibility};
use crate::syntax::analyze;
use crate::syntax::ast::*;

pub use eval::{evaluate, evaluate_lenient, predicate_holds, violations_at, EvalError, Violation, TARGET_PREDICATE};
pub use names::predicate_name;
pub use ocl::emit_ocl;

/// Modifier requirements of one statement. `None` means "don't care".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ModifierTest {
    pub visibility: Option<Visibility>,
    pub is_abstract: Option<bool>,
    pub is_static: Option<bool>,
    pub is_final: Option<bool>,
}

impl ModifierTest {
    pub fn from_modifiers(m: &Modifiers) -> Self {
        let flag = |b: bool| if b { Some(true) } else { None };
        ModifierTest {
            visibility: m.visibility,
            is_abstract: flag(m.is_abstract),
            is_static: flag(m.is_static),
            is_final: flag(m.is_final),
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == ModifierTest::default()
    }

    pub fn holds(&self, model: &ProgramModel, el: ElementRef) -> bool {
        self.visibility.is_none_or(|v| model.visibility(el) == v)
            && self.is_abstract.is_none_or(|b| model.is_abstract(el) == b)
            && self.is_static.is_none_or(|b| model.is_static(el) == b)
            && self.is_final.is_none_or(|b| model.is_final(el) == b)
    }

    fn words(&self) -> Vec<&'static str> {
        let mut w = Vec::new();
        if let Some(v) = self.visibility {
            w.push(v.keyword());
        }
        if self.is_final == Some(true) {
            w.push("final");
        }
        if self.is_abstract == Some(true) {
            w.push("abstract");
        }
        if self.is_static == Some(true) {
            w.push("static");
        }
        w
    }
}

/// A compiled statement: target type, modifiers and co-annotation.
/// `target == None` comes from a bare `@A` statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementTest {
    pub target: Option<TargetType>,
    pub mods: ModifierTest,
    pub co_ann: Option<String>,
}

impl ElementTest {
    pub fn from_statement(s: &Statement) -> Self {
        ElementTest { target: s.target, mods: ModifierTest::from_modifiers(&s.modifiers), co_ann: s.ann_ref.clone() }
    }

    pub fn is_bare(&self) -> bool {
        self.target.is_none()
    }

    /// Whether `el` matches this test. A bare test only checks the annotation.
    pub fn holds(&self, model: &ProgramModel, el: ElementRef) -> bool {
        self.target.is_none_or(|t| model.target_type(el) == t)
            && self.mods.holds(model, el)
            && self.co_ann.as_deref().is_none_or(|a| model.carries(el, a))
    }

    /// Short English phrase, e.g. "a public constructor" or "a class annotated @Entity".
    pub fn phrase(&self) -> String {
        let mut words: Vec<String> = self.mods.words().into_iter().map(str::to_string).collect();
        match self.target {
            Some(t) => words.push(t.keyword().to_string()),
            None => return format!("@{}", self.co_ann.as_deref().unwrap_or("?")),
        }
        let body = words.join(" ");
        let article = if body.starts_with(['a', 'e', 'i', 'o', 'u']) { "an" } else { "a" };
        match &self.co_ann {
            Some(a) => format!("{article} {body} annotated @{a}"),
            None => format!("{article} {body}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Require,
    Forbid,
}

impl From<ConstraintKind> for Polarity {
    fn from(k: ConstraintKind) -> Self {
        match k {
            ConstraintKind::Require => Polarity::Require,
            ConstraintKind::Forbid => Polarity::Forbid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    /// Unscoped require: the annotated element matches one of the disjuncts
    /// whose type is its own. Vacuous when none has its type.
    TargetCondition { disjuncts: Vec<ElementTest> },
    /// Unscoped forbid: violated when the element matches every conjunct.
    ForbiddenTargetCondition { conjuncts: Vec<ElementTest> },
    /// Only bare `@A` statements: the annotated element itself carries
    /// some (require) or all (forbid) of `anns`.
    SameElementCoOccurrence { scope: Option<TargetType>, anns: Vec<String>, polarity: Polarity },
    /// `at C: require` over members of container type `C`.
    MemberExists { scope: TargetType, disjuncts: Vec<ElementTest> },
    /// `at C: require all`: some disjunct holds for every member of its type.
    MemberForAll { scope: TargetType, disjuncts: Vec<ElementTest> },
    /// `at C: forbid`: violated when every conjunct has a witnessing member.
    MemberForbidden { scope: TargetType, conjuncts: Vec<ElementTest> },
    /// `at M:` for member type `M`: conditions on the enclosing classifier.
    OwnerCondition { scope: TargetType, tests: Vec<ElementTest>, polarity: Polarity },
}

impl Predicate {
    pub fn polarity(&self) -> Polarity {
        match self {
            Predicate::TargetCondition { .. } | Predicate::MemberExists { .. } | Predicate::MemberForAll { .. } => {
                Polarity::Require
            }
            Predicate::ForbiddenTargetCondition { .. } | Predicate::MemberForbidden { .. } => Polarity::Forbid,
            Predicate::SameElementCoOccurrence { polarity, .. } | Predicate::OwnerCondition { polarity, .. } => *polarity,
        }
    }

    pub fn scope(&self) -> Option<TargetType> {
        match self {
            Predicate::TargetCondition { .. } | Predicate::ForbiddenTargetCondition { .. } => None,
            Predicate::SameElementCoOccurrence { scope, .. } => *scope,
            Predicate::MemberExists { scope, .. }
            | Predicate::MemberForAll { scope, .. }
            | Predicate::MemberForbidden { scope, .. }
            | Predicate::OwnerCondition { scope, .. } => Some(*scope),
        }
    }

    /// Statement-level tests, in source order.
    pub fn tests(&self) -> Vec<ElementTest> {
        match self {
            Predicate::TargetCondition { disjuncts: t }
            | Predicate::ForbiddenTargetCondition { conjuncts: t }
            | Predicate::MemberExists { disjuncts: t, .. }
            | Predicate::MemberForAll { disjuncts: t, .. }
            | Predicate::MemberForbidden { conjuncts: t, .. }
            | Predicate::OwnerCondition { tests: t, .. } => t.clone(),
            Predicate::SameElementCoOccurrence { anns, .. } => anns
                .iter()
                .map(|a| ElementTest { target: None, mods: ModifierTest::default(), co_ann: Some(a.clone()) })
                .collect(),
        }
    }

    /// Every annotation name this predicate mentions.
    pub fn referenced_annotations(&self) -> Vec<String> {
        self.tests().into_iter().filter_map(|t| t.co_ann).collect()
    }

    /// One-line English description used in diagnostics.
    pub fn describe(&self) -> String {
        let join = |tests: &[ElementTest], sep: &str| tests.iter().map(ElementTest::phrase).collect::<Vec<_>>().join(sep);
        match self {
            Predicate::TargetCondition { disjuncts } => {
                format!("requires the annotated element to be {}", join(disjuncts, " or "))
            }
            Predicate::ForbiddenTargetCondition { conjuncts } => {
                format!("forbids the annotated element from being {}", join(conjuncts, " and "))
            }
            Predicate::SameElementCoOccurrence { scope, anns, polarity } => {
                let list: Vec<String> = anns.iter().map(|a| format!("@{a}")).collect();
                let on = scope.map(|s| format!("annotated {s}")).unwrap_or_else(|| "annotated element".to_string());
                match polarity {
                    Polarity::Require => format!("requires the {on} to also carry {}", list.join(" or ")),
                    Polarity::Forbid => format!("forbids the {on} from also carrying {}", list.join(" and ")),
                }
            }
            Predicate::MemberExists { scope, disjuncts } => {
                format!("requires {} in the annotated {scope}", join(disjuncts, " or "))
            }
            Predicate::MemberForAll { scope, disjuncts } => {
                let parts: Vec<String> = disjuncts
                    .iter()
                    .map(|d| match d.target {
                        Some(t) => format!("every {t} to be {}", d.phrase()),
                        None => d.phrase(),
                    })
                    .collect();
                format!("requires {} in the annotated {scope}", parts.join(" or "))
            }
            Predicate::MemberForbidden { scope, conjuncts } => {
                format!("forbids {} in the annotated {scope}", join(conjuncts, " together with "))
            }
            Predicate::OwnerCondition { scope, tests, polarity } => match polarity {
                Polarity::Require => {
                    format!("requires the annotated {scope} to be declared in {}", join(tests, " or "))
                }
                Polarity::Forbid => {
                    format!("forbids the annotated {scope} from being declared in {}", join(tests, " and "))
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedPredicate {
    pub name: String,
    /// Index of the originating constraint within its annotation.
    pub origin: usize,
    pub predicate: Predicate,
    /// The constraint as written, normalised.
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    /// A single allowed target type; the use annotates exactly one such element.
    ExactlyOne,
    /// Several allowed types: at most one per type, exactly one overall.
    OnePerTypeOneOverall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationIR {
    pub name: String,
    pub retention: Retention,
    pub attributes: Vec<AttributeDef>,
    /// Allowed target types in first-mention order.
    pub allowed: Vec<TargetType>,
    /// Whether `allowed` came from explicit statements (vs. all seven implied).
    pub explicit_targets: bool,
    pub multiplicity: Multiplicity,
    /// For each allowed type, the co-annotation of the first statement naming it.
    pub target_co_ann: Vec<(TargetType, Option<String>)>,
    pub predicates: Vec<NamedPredicate>,
}

impl AnnotationIR {
    pub fn allows(&self, t: TargetType) -> bool {
        self.allowed.contains(&t)
    }

    pub fn predicate(&self, name: &str) -> Option<&NamedPredicate> {
        self.predicates.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintIR {
    pub annotations: Vec<AnnotationIR>,
    /// Annotations referenced by `@Name` but not defined in the set.
    pub external: BTreeSet<String>,
}

impl ConstraintIR {
    pub fn get(&self, name: &str) -> Option<&AnnotationIR> {
        self.annotations.iter().find(|a| a.name == name)
    }

    pub fn knows(&self, name: &str) -> bool {
        self.get(name).is_some() || self.external.contains(name)
    }

    pub fn predicate_count(&self) -> usize {
        self.annotations.iter().map(|a| a.predicates.len()).sum()
    }
}

impl fmt::Display for ConstraintIR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.annotations {
            let targets: Vec<&str> = a.allowed.iter().map(|t| t.keyword()).collect();
            writeln!(f, "{} targets={{{}}}", a.name, targets.join(", "))?;
            for p in &a.predicates {
                writeln!(f, "  {}: {}", p.name, p.predicate.describe())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub ir: ConstraintIR,
    /// Analysis and compile warnings.
    pub warnings: Vec<Diagnostic>,
}

/// Analyzes and compiles a file set. Fails with the analysis errors, if any.
pub fn compile(files: &[AnnSourceFile]) -> Result<Compiled, Vec<Diagnostic>> {
    let diags = analyze(files);
    if has_errors(&diags) {
        return Err(diags);
    }
    let mut warnings = diags;
    let mut ir = ConstraintIR::default();
    for f in files {
        for def in &f.annotations {
            let a = compile_annotation(def);
            for p in &a.predicates {
                if let Some(scope) = p.predicate.scope() {
                    if !a.allows(scope) {
                        let span = def.constraints[p.origin].span;
                        warnings.push(Diagnostic::warning(
                            "unreachable-scope",
                            &f.source_path,
                            span,
                            format!("`{}` never applies: @{} cannot target {scope}", p.source, a.name),
                        ));
                    }
                    if scope == TargetType::Enum {
                        let span = def.constraints[p.origin].span;
                        warnings.push(Diagnostic::warning(
                            "enum-scope",
                            &f.source_path,
                            span,
                            "`at enum:` constraints are checked like `at class:` ones",
                        ));
                    }
                }
            }
            ir.annotations.push(a);
        }
    }
    ir.external = external_refs(&ir.annotations);
    Ok(Compiled { ir, warnings })
}

/// Compiles annotation definitions directly, skipping analysis. Intended for
/// definitions already known to be valid.
pub fn compile_defs(defs: &[AnnotationDef]) -> ConstraintIR {
    let annotations: Vec<AnnotationIR> = defs.iter().map(compile_annotation).collect();
    let external = external_refs(&annotations);
    ConstraintIR { annotations, external }
}

fn external_refs(annotations: &[AnnotationIR]) -> BTreeSet<String> {
    let defined: BTreeSet<&str> = annotations.iter().map(|a| a.name.as_str()).collect();
    annotations
        .iter()
        .flat_map(|a| a.predicates.iter().flat_map(|p| p.predicate.referenced_annotations()))
        .filter(|r| !defined.contains(r.as_str()))
        .collect()
}

fn compile_annotation(def: &AnnotationDef) -> AnnotationIR {
    let mut target_co_ann: Vec<(TargetType, Option<String>)> = Vec::new();
    for c in def.constraints.iter().filter(|c| c.kind == ConstraintKind::Require && c.scope.is_none()) {
        for s in &c.statements {
            if let Some(t) = s.target {
                if !target_co_ann.iter().any(|(x, _)| *x == t) {
                    target_co_ann.push((t, s.ann_ref.clone()));
                }
            }
        }
    }
    let explicit_targets = !target_co_ann.is_empty();
    if !explicit_targets {
        target_co_ann = TargetType::ALL.iter().map(|&t| (t, None)).collect();
    }
    let allowed: Vec<TargetType> = target_co_ann.iter().map(|(t, _)| *t).collect();
    let multiplicity = if allowed.len() == 1 { Multiplicity::ExactlyOne } else { Multiplicity::OnePerTypeOneOverall };

    let mut predicates: Vec<NamedPredicate> = Vec::new();
    for (i, c) in def.constraints.iter().enumerate() {
        let predicate = lower(c);
        let base = predicate_name(c);
        let mut name = base.clone();
        let mut n = 2;
        while predicates.iter().any(|p| p.name == name) {
            name = format!("{base}_{n}");
            n += 1;
        }
        predicates.push(NamedPredicate {
            name,
            origin: i,
            predicate,
            source: crate::syntax::pretty::constraint_text(c),
        });
    }
    AnnotationIR {
        name: def.name.clone(),
        retention: def.retention,
        attributes: def.attributes.clone(),
        allowed,
        explicit_targets,
        multiplicity,
        target_co_ann,
        predicates,
    }
}

fn lower(c: &ConstraintDef) -> Predicate {
    let tests: Vec<ElementTest> = c.statements.iter().map(ElementTest::from_statement).collect();
    let polarity = Polarity::from(c.kind);
    if tests.iter().all(ElementTest::is_bare) {
        let anns = tests.into_iter().filter_map(|t| t.co_ann).collect();
        return Predicate::SameElementCoOccurrence { scope: c.scope, anns, polarity };
    }
    match (c.scope, c.kind) {
        (None, ConstraintKind::Require) => Predicate::TargetCondition { disjuncts: tests },
        (None, ConstraintKind::Forbid) => Predicate::ForbiddenTargetCondition { conjuncts: tests },
        (Some(scope), ConstraintKind::Require) if scope.is_container() => {
            if c.all {
                Predicate::MemberForAll { scope, disjuncts: tests }
            } else {
                Predicate::MemberExists { scope, disjuncts: tests }
            }
        }
        (Some(scope), ConstraintKind::Forbid) if scope.is_container() => {
            Predicate::MemberForbidden { scope, conjuncts: tests }
        }
        (Some(scope), _) => Predicate::OwnerCondition { scope, tests, polarity },
    }
}
