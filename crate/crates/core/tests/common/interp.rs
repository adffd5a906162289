//! Direct interpreter of parsed constraints. Reads `ConstraintDef`s as
//! written, without going through the compiled predicates.

use annlint::model::{ElementRef, ProgramModel};
use annlint::syntax::ast::{AnnotationDef, ConstraintDef, ConstraintKind, Statement, TargetType};

/// Annotation uses resolved to element handles.
pub struct Placed<'m> {
    pub model: &'m ProgramModel,
    uses: Vec<(ElementRef, String)>,
}

impl<'m> Placed<'m> {
    pub fn new(model: &'m ProgramModel) -> Self {
        let uses = model
            .annotation_uses
            .iter()
            .map(|u| (model.resolve(&u.target).expect("use resolves"), u.ann.clone()))
            .collect();
        Placed { model, uses }
    }

    fn carries(&self, el: ElementRef, ann: &str) -> bool {
        self.uses.iter().any(|(e, a)| *e == el && a == ann)
    }

    /// Whether `el` fits the description in `st`.
    fn describes(&self, st: &Statement, el: ElementRef) -> bool {
        let m = self.model;
        let mods = &st.modifiers;
        st.target.is_none_or(|t| m.target_type(el) == t)
            && mods.visibility.is_none_or(|v| m.visibility(el) == v)
            && (!mods.is_final || m.is_final(el))
            && (!mods.is_abstract || m.is_abstract(el))
            && (!mods.is_static || m.is_static(el))
            && st.ann_ref.as_deref().is_none_or(|a| self.carries(el, a))
    }

    fn members(&self, el: ElementRef) -> Vec<ElementRef> {
        match el {
            ElementRef::Classifier(c) => self.model.members(c).collect(),
            _ => Vec::new(),
        }
    }

    /// Whether constraint `c` is met by a use placed on `el`.
    pub fn constraint_holds(&self, c: &ConstraintDef, el: ElementRef) -> bool {
        let t = self.model.target_type(el);
        let require = c.kind == ConstraintKind::Require;
        let Some(scope) = c.scope else {
            if require {
                let mut applicable = c.statements.iter().filter(|s| s.target.is_none_or(|x| x == t)).peekable();
                return applicable.peek().is_none() || applicable.any(|s| self.describes(s, el));
            }
            return !c.statements.iter().all(|s| self.describes(s, el));
        };
        if scope != t {
            return true;
        }
        // A statement naming only an annotation is about the element itself.
        let on_self = |s: &Statement| s.target.is_none();
        let witnessed: Vec<bool> = if scope.is_container() {
            let members = self.members(el);
            c.statements
                .iter()
                .map(|s| {
                    if on_self(s) {
                        self.describes(s, el)
                    } else if c.all {
                        members
                            .iter()
                            .filter(|&&m| Some(self.model.target_type(m)) == s.target)
                            .all(|&m| self.describes(s, m))
                    } else {
                        members.iter().any(|&m| self.describes(s, m))
                    }
                })
                .collect()
        } else {
            let owner = ElementRef::Classifier(el.owner().expect("members have owners"));
            c.statements.iter().map(|s| if on_self(s) { self.describes(s, el) } else { self.describes(s, owner) }).collect()
        };
        if require {
            witnessed.iter().any(|&w| w)
        } else {
            !witnessed.iter().all(|&w| w)
        }
    }

    /// The indices of `def`'s constraints violated by a use on `el`, and
    /// whether `el` has a type the definition does not allow.
    pub fn failures(&self, def: &AnnotationDef, el: ElementRef) -> (bool, Vec<usize>) {
        let bad_target = !allowed_targets(def).contains(&self.model.target_type(el));
        let failed = def
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.constraint_holds(c, el))
            .map(|(i, _)| i)
            .collect();
        (bad_target, failed)
    }

    /// Every use of a defined annotation is on an allowed target and meets
    /// all constraints. Uses of other annotations are ignored.
    pub fn accepts(&self, defs: &[AnnotationDef]) -> bool {
        self.uses.iter().all(|(el, ann)| match defs.iter().find(|d| &d.name == ann) {
            Some(def) => {
                let (bad, failed) = self.failures(def, *el);
                !bad && failed.is_empty()
            }
            None => true,
        })
    }
}

/// Target types named by unscoped requires; all of them when none is named.
pub fn allowed_targets(def: &AnnotationDef) -> Vec<TargetType> {
    let named: Vec<TargetType> = def
        .constraints
        .iter()
        .filter(|c| c.kind == ConstraintKind::Require && c.scope.is_none())
        .flat_map(|c| c.statements.iter().filter_map(|s| s.target))
        .collect();
    if named.is_empty() {
        TargetType::ALL.to_vec()
    } else {
        named
    }
}
