//! Witness checking and greedy shrinking.

use std::collections::BTreeMap;

use super::{Demand, Scope};
use crate::compiler::{evaluate, ConstraintIR};
use crate::model::{well_formed, ClassifierKind, ElementPath, ElementRef, ProgramModel, Visibility};

/// Whether some element satisfies the demand.
pub fn demand_holds(model: &ProgramModel, d: &Demand) -> bool {
    model.elements().into_iter().any(|e| {
        d.target.is_none_or(|t| model.target_type(e) == t)
            && d.mods.holds(model, e)
            && d.anns.iter().all(|a| model.carries(e, a))
    })
}

/// Whether `model` is an acceptable finder answer: structurally valid,
/// well-formed, violation free, inside the scope and meeting the demands.
pub fn is_witness(ir: &ConstraintIR, scope: &Scope, extra: &[Demand], model: &ProgramModel) -> bool {
    if model.validate_structure().is_err() || !well_formed(model).is_empty() {
        return false;
    }
    if model.classifiers.len() > scope.max_classifiers
        || model.classifiers.iter().any(|c| {
            c.methods.len() > scope.max_methods || c.fields.len() > scope.max_fields || !scope.allows_kind(c.kind)
        })
    {
        return false;
    }
    if !scope.inheritance && model.classifiers.iter().any(|c| c.extends.is_some() || !c.implements.is_empty()) {
        return false;
    }
    for a in &ir.annotations {
        let n = model.uses_of(&a.name).count() as u32;
        let min = if scope.relaxed.contains(&a.name) { 0 } else { scope.ann_min };
        if n < min || n > scope.ann_max {
            return false;
        }
    }
    for e in &ir.external {
        if model.uses_of(e).count() as u32 > scope.ann_max {
            return false;
        }
    }
    matches!(evaluate(ir, model), Ok(v) if v.is_empty()) && extra.iter().all(|d| demand_holds(model, d))
}

fn annotated(model: &ProgramModel, el: ElementRef) -> bool {
    let p = model.path(el);
    model.annotation_uses.iter().any(|u| u.target == p)
}

/// Greedily drops uses, classifiers, members and modifiers while the model
/// stays a witness, then renumbers names.
pub(crate) fn minimize(ir: &ConstraintIR, scope: &Scope, extra: &[Demand], mut model: ProgramModel) -> ProgramModel {
    let ok = |m: &ProgramModel| is_witness(ir, scope, extra, m);
    let try_edit = |model: &mut ProgramModel, edit: &dyn Fn(&mut ProgramModel)| {
        let mut c = model.clone();
        edit(&mut c);
        if ok(&c) {
            *model = c;
            true
        } else {
            false
        }
    };

    for i in (0..model.annotation_uses.len()).rev() {
        try_edit(&mut model, &|m| {
            m.annotation_uses.remove(i);
        });
    }
    for c in (0..model.classifiers.len()).rev() {
        let idle = !annotated(&model, ElementRef::Classifier(c))
            && !model.members(c).any(|e| annotated(&model, e));
        if idle {
            try_edit(&mut model, &|m| {
                m.classifiers.remove(c);
            });
        }
    }
    for c in 0..model.classifiers.len() {
        for j in (0..model.classifiers[c].methods.len()).rev() {
            if !annotated(&model, ElementRef::Method(c, j)) {
                try_edit(&mut model, &|m| {
                    m.classifiers[c].methods.remove(j);
                });
            }
        }
        for j in (0..model.classifiers[c].fields.len()).rev() {
            if !annotated(&model, ElementRef::Field(c, j)) {
                try_edit(&mut model, &|m| {
                    m.classifiers[c].fields.remove(j);
                });
            }
        }
    }
    for c in 0..model.classifiers.len() {
        try_edit(&mut model, &|m| m.classifiers[c].kind = ClassifierKind::Class);
        try_edit(&mut model, &|m| m.classifiers[c].is_abstract = false);
        try_edit(&mut model, &|m| m.classifiers[c].is_final = false);
        try_edit(&mut model, &|m| m.classifiers[c].is_static = false);
        try_edit(&mut model, &|m| m.classifiers[c].visibility = Visibility::Package);
        for j in 0..model.classifiers[c].methods.len() {
            try_edit(&mut model, &|m| m.classifiers[c].methods[j].is_abstract = false);
            try_edit(&mut model, &|m| m.classifiers[c].methods[j].is_final = false);
            try_edit(&mut model, &|m| m.classifiers[c].methods[j].is_static = false);
            try_edit(&mut model, &|m| m.classifiers[c].methods[j].visibility = Visibility::Package);
        }
        for j in 0..model.classifiers[c].fields.len() {
            try_edit(&mut model, &|m| m.classifiers[c].fields[j].is_final = false);
            try_edit(&mut model, &|m| m.classifiers[c].fields[j].is_static = false);
            try_edit(&mut model, &|m| m.classifiers[c].fields[j].visibility = Visibility::Package);
        }
    }
    let renamed = renumber(&model);
    debug_assert!(ok(&renamed));
    renamed
}

/// Canonical names: `C1..` for classifiers, `m1..` for methods, `f1..` for
/// fields; constructors take their class name.
pub(crate) fn renumber(model: &ProgramModel) -> ProgramModel {
    let mut out = model.clone();
    let mut paths: BTreeMap<ElementPath, ElementPath> = BTreeMap::new();
    let class_names: BTreeMap<String, String> =
        model.classifiers.iter().enumerate().map(|(i, c)| (c.name.clone(), format!("C{}", i + 1))).collect();
    for c in out.classifiers.iter_mut() {
        let old = c.name.clone();
        let new = class_names[&old].clone();
        paths.insert(ElementPath::Classifier(old.clone()), ElementPath::Classifier(new.clone()));
        let mut n = 0;
        for m in c.methods.iter_mut() {
            let name = if m.is_constructor {
                new.clone()
            } else {
                n += 1;
                format!("m{n}")
            };
            paths.insert(ElementPath::Method(old.clone(), m.name.clone()), ElementPath::Method(new.clone(), name.clone()));
            m.name = name;
        }
        for (j, f) in c.fields.iter_mut().enumerate() {
            let name = format!("f{}", j + 1);
            paths.insert(ElementPath::Field(old.clone(), f.name.clone()), ElementPath::Field(new.clone(), name.clone()));
            f.name = name;
        }
        c.name = new;
        c.extends = c.extends.as_ref().map(|e| class_names[e].clone());
        c.implements = c.implements.iter().map(|e| class_names[e].clone()).collect();
    }
    for u in &mut out.annotation_uses {
        u.target = paths[&u.target].clone();
    }
    out
}
