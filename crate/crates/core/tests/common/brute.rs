//! Exhaustive search at the equivalence scope: at most two classifiers
//! (class, interface or annotation type), each with at most one method and
//! one field, and exactly one use of every defined annotation.
//!
//! Without inheritance no constraint relates two classifiers, so a set is
//! satisfiable iff its annotations split into two groups that can each be
//! placed on a single classifier. Flags no statement mentions are held
//! false and unmentioned visibilities collapse to one representative; the
//! interpreter cannot tell the collapsed values apart.

use annlint::model::{
    well_formed, AnnotationUse, Classifier, ClassifierKind, Field, Method, ProgramModel, Visibility,
};
use annlint::syntax::ast::AnnotationDef;

use super::interp::Placed;

#[derive(Default)]
struct Mentioned {
    vis: Vec<Visibility>,
    is_final: bool,
    is_abstract: bool,
    is_static: bool,
}

fn mentioned(defs: &[AnnotationDef]) -> Mentioned {
    let mut m = Mentioned::default();
    for st in defs.iter().flat_map(|d| &d.constraints).flat_map(|c| &c.statements) {
        if let Some(v) = st.modifiers.visibility {
            if !m.vis.contains(&v) {
                m.vis.push(v);
            }
        }
        m.is_final |= st.modifiers.is_final;
        m.is_abstract |= st.modifiers.is_abstract;
        m.is_static |= st.modifiers.is_static;
    }
    m
}

fn representatives(pool: &[Visibility], mentioned: &[Visibility]) -> Vec<Visibility> {
    let mut out: Vec<Visibility> = pool.iter().copied().filter(|v| mentioned.contains(v)).collect();
    out.extend(pool.iter().copied().find(|v| !mentioned.contains(v)));
    out
}

fn flag(varies: bool) -> &'static [bool] {
    if varies {
        &[false, true]
    } else {
        &[false]
    }
}

const NAME: &str = "C1";

fn classifiers(m: &Mentioned) -> Vec<Classifier> {
    let mut out = Vec::new();
    for kind in [ClassifierKind::Class, ClassifierKind::Interface, ClassifierKind::Annotation] {
        for &visibility in &representatives(&[Visibility::Package, Visibility::Public], &m.vis) {
            for &is_abstract in flag(m.is_abstract) {
                for &is_static in flag(m.is_static) {
                    for &is_final in flag(m.is_final) {
                        out.push(Classifier {
                            visibility,
                            is_abstract,
                            is_static,
                            is_final,
                            ..Classifier::new(NAME, kind)
                        });
                    }
                }
            }
        }
    }
    out
}

fn methods(m: &Mentioned) -> Vec<Option<Method>> {
    let mut out = vec![None];
    let vis = representatives(&[Visibility::Package, Visibility::Private, Visibility::Protected, Visibility::Public], &m.vis);
    for is_constructor in [false, true] {
        let name = if is_constructor { NAME } else { "m1" };
        for &visibility in &vis {
            for &is_abstract in flag(m.is_abstract) {
                for &is_static in flag(m.is_static) {
                    for &is_final in flag(m.is_final) {
                        out.push(Some(Method {
                            visibility,
                            is_abstract,
                            is_static,
                            is_final,
                            is_constructor,
                            ..Method::new(name)
                        }));
                    }
                }
            }
        }
    }
    out
}

fn fields(m: &Mentioned) -> Vec<Option<Field>> {
    let mut out = vec![None];
    let vis = representatives(&[Visibility::Package, Visibility::Private, Visibility::Protected, Visibility::Public], &m.vis);
    for &visibility in &vis {
        for &is_static in flag(m.is_static) {
            for &is_final in flag(m.is_final) {
                out.push(Some(Field { visibility, is_static, is_final, ..Field::new("f1") }));
            }
        }
    }
    out
}

/// `result[mask]`: the annotations in `mask` (bit i for `defs[i]`) can all be
/// placed on one classifier, each exactly once.
pub fn single_classifier_feasible(defs: &[AnnotationDef]) -> Vec<bool> {
    let n = defs.len();
    let mut feasible = vec![false; 1 << n];
    let m = mentioned(defs);
    let (cs, ms, fs) = (classifiers(&m), methods(&m), fields(&m));
    for c in &cs {
        for mo in &ms {
            for fo in &fs {
                let mut cl = c.clone();
                cl.methods.extend(mo.clone());
                cl.fields.extend(fo.clone());
                let mut model = ProgramModel { classifiers: vec![cl], annotation_uses: Vec::new() };
                if model.validate_structure().is_err() || !well_formed(&model).is_empty() {
                    continue;
                }
                let elements = model.elements();
                let slots = elements.len() + 1;
                for code in 0..slots.pow(n as u32) {
                    let mut mask = 0;
                    let mut uses = Vec::new();
                    let mut rest = code;
                    for (i, d) in defs.iter().enumerate() {
                        let slot = rest % slots;
                        rest /= slots;
                        if slot > 0 {
                            mask |= 1 << i;
                            uses.push(AnnotationUse::new(&d.name, model.path(elements[slot - 1])));
                        }
                    }
                    if feasible[mask] {
                        continue;
                    }
                    model.annotation_uses = uses;
                    if Placed::new(&model).accepts(defs) {
                        feasible[mask] = true;
                        if feasible.iter().all(|&f| f) {
                            return feasible;
                        }
                    }
                }
            }
        }
    }
    feasible
}

pub fn satisfiable(defs: &[AnnotationDef]) -> bool {
    let feasible = single_classifier_feasible(defs);
    let full = feasible.len() - 1;
    (0..=full).any(|m| feasible[m] && feasible[full ^ m])
}
