//! Propositional encoding of "a program model with exactly `k` classifiers
//! that is well-formed, covers every annotation and satisfies the IR".

use super::sat::{Lit, Solver};
use super::{Demand, Scope};
use crate::compiler::{ConstraintIR, ElementTest, ModifierTest, Polarity, Predicate};
use crate::model::{
    AnnotationUse, Classifier, ClassifierKind, ElementPath, Field, Method, ProgramModel, Visibility,
};
use crate::syntax::ast::TargetType;

/// Negation-normal-form formula over solver literals.
#[derive(Debug, Clone)]
enum F {
    Const(bool),
    Lit(Lit),
    And(Vec<F>),
    Or(Vec<F>),
}

impl F {
    fn and(parts: Vec<F>) -> F {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                F::Const(true) => {}
                F::Const(false) => return F::Const(false),
                F::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => F::Const(true),
            1 => out.pop().unwrap(),
            _ => F::And(out),
        }
    }

    fn or(parts: Vec<F>) -> F {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                F::Const(false) => {}
                F::Const(true) => return F::Const(true),
                F::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => F::Const(false),
            1 => out.pop().unwrap(),
            _ => F::Or(out),
        }
    }

    fn not(self) -> F {
        match self {
            F::Const(b) => F::Const(!b),
            F::Lit(l) => F::Lit(!l),
            F::And(v) => F::or(v.into_iter().map(F::not).collect()),
            F::Or(v) => F::and(v.into_iter().map(F::not).collect()),
        }
    }

    fn implies(a: F, b: F) -> F {
        F::or(vec![a.not(), b])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Classifier(usize),
    Method(usize, usize),
    Field(usize, usize),
}

struct MemberVars {
    present: Lit,
    vis: [Lit; 4],
    is_abstract: Lit,
    is_static: Lit,
    is_final: Lit,
    /// Methods only.
    ctor: Lit,
    on: Vec<Lit>,
}

struct ClassVars {
    kind: [Lit; 4],
    vis: [Lit; 4],
    /// Effective abstractness (implied for interfaces and annotation types).
    is_abstract: Lit,
    is_static: Lit,
    is_final: Lit,
    on: Vec<Lit>,
    methods: Vec<MemberVars>,
    fields: Vec<MemberVars>,
    /// `extends[j]` for lower slots `j`, when inheritance is enabled.
    extends: Vec<Lit>,
    implements: Vec<Lit>,
}

pub(crate) struct Encoding {
    pub solver: Solver,
    anns: Vec<String>,
    slots: Vec<ClassVars>,
    truth: Lit,
}

fn vis_index(v: Visibility) -> usize {
    Visibility::ALL.iter().position(|&x| x == v).unwrap()
}

fn kind_index(k: ClassifierKind) -> usize {
    ClassifierKind::ALL.iter().position(|&x| x == k).unwrap()
}

/// Annotation names the finder may place: defined ones in declaration order,
/// then external references.
pub(crate) fn universe(ir: &ConstraintIR) -> Vec<String> {
    ir.annotations.iter().map(|a| a.name.clone()).chain(ir.external.iter().cloned()).collect()
}

impl Encoding {
    pub fn new(ir: &ConstraintIR, scope: &Scope, extra: &[Demand], k: usize) -> Encoding {
        let mut solver = Solver::new();
        solver.set_learning(scope.pruning);
        let truth = Lit::pos(solver.new_var());
        solver.add_clause(&[truth]);
        let anns = universe(ir);
        let mut enc = Encoding { solver, anns, slots: Vec::new(), truth };
        for i in 0..k {
            let slot = enc.class_slot(scope, i);
            enc.slots.push(slot);
        }
        enc.structure(scope);
        enc.placement(ir, scope);
        enc.predicates(ir);
        for d in extra {
            let f = F::or((0..enc.slots.len()).flat_map(|i| enc.slot_list(i)).map(|s| enc.demand(s, d)).collect());
            enc.require(f);
        }
        enc
    }

    fn fresh(&mut self) -> Lit {
        Lit::pos(self.solver.new_var())
    }

    fn clause(&mut self, lits: &[Lit]) {
        self.solver.add_clause(lits);
    }

    fn exactly_one(&mut self, lits: &[Lit]) {
        self.clause(lits);
        for a in 0..lits.len() {
            for b in a + 1..lits.len() {
                self.clause(&[!lits[a], !lits[b]]);
            }
        }
    }

    fn member_vars(&mut self, n_anns: usize) -> MemberVars {
        let present = self.fresh();
        let vis = [self.fresh(), self.fresh(), self.fresh(), self.fresh()];
        let (is_abstract, is_static, is_final, ctor) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
        let on: Vec<Lit> = (0..n_anns).map(|_| self.fresh()).collect();
        self.exactly_one(&vis);
        // An absent member takes canonical values so it has no free variables.
        let pkg = vis[vis_index(Visibility::Package)];
        self.clause(&[present, pkg]);
        for l in [is_abstract, is_static, is_final, ctor] {
            self.clause(&[present, !l]);
        }
        for &l in &on {
            self.clause(&[present, !l]);
        }
        MemberVars { present, vis, is_abstract, is_static, is_final, ctor, on }
    }

    fn class_slot(&mut self, scope: &Scope, i: usize) -> ClassVars {
        let n = self.anns.len();
        let kind = [self.fresh(), self.fresh(), self.fresh(), self.fresh()];
        let vis = [self.fresh(), self.fresh(), self.fresh(), self.fresh()];
        let (is_abstract, is_static, is_final) = (self.fresh(), self.fresh(), self.fresh());
        let on = (0..n).map(|_| self.fresh()).collect();
        let methods = (0..scope.max_methods).map(|_| self.member_vars(n)).collect();
        let fields = (0..scope.max_fields).map(|_| self.member_vars(n)).collect();
        let (extends, implements) = if scope.inheritance {
            ((0..i).map(|_| self.fresh()).collect(), (0..i).map(|_| self.fresh()).collect())
        } else {
            (Vec::new(), Vec::new())
        };
        self.exactly_one(&kind);
        self.exactly_one(&vis);
        for k in ClassifierKind::ALL {
            if !scope.allows_kind(k) {
                self.clause(&[!kind[kind_index(k)]]);
            }
        }
        ClassVars { kind, vis, is_abstract, is_static, is_final, on, methods, fields, extends, implements }
    }

    /// Structural shape rules and the built-in well-formedness invariants.
    fn structure(&mut self, scope: &Scope) {
        let ki = |k| kind_index(k);
        for i in 0..self.slots.len() {
            let c = &self.slots[i];
            let (interface, annotation, en, class) = (
                c.kind[ki(ClassifierKind::Interface)],
                c.kind[ki(ClassifierKind::Annotation)],
                c.kind[ki(ClassifierKind::Enum)],
                c.kind[ki(ClassifierKind::Class)],
            );
            let (abs, fin) = (c.is_abstract, c.is_final);
            let no_private = !c.vis[vis_index(Visibility::Private)];
            let no_protected = !c.vis[vis_index(Visibility::Protected)];
            let methods: Vec<(Lit, Lit, Lit, Lit, Lit)> =
                c.methods.iter().map(|m| (m.present, m.ctor, m.is_abstract, m.is_static, m.vis[0])).collect();
            let fields: Vec<Lit> = c.fields.iter().map(|f| f.present).collect();
            let field_only_false: Vec<Lit> = c.fields.iter().flat_map(|f| [f.is_abstract, f.ctor]).collect();
            let method_present: Vec<Lit> = methods.iter().map(|m| m.0).collect();
            let extends = c.extends.clone();
            let implements = c.implements.clone();

            // Top-level visibility.
            self.clause(&[no_private]);
            self.clause(&[no_protected]);
            self.clause(&[!interface, abs]);
            self.clause(&[!annotation, abs]);
            self.clause(&[!en, !abs]);
            self.clause(&[!interface, !fin]);
            for f in &fields {
                self.clause(&[!annotation, !*f]);
            }
            for a in field_only_false {
                self.clause(&[!a]);
            }
            let ctors: Vec<Lit> = methods.iter().map(|m| m.1).collect();
            for &(_, ctor, m_abs, m_stat, _) in &methods {
                self.clause(&[!m_abs, abs]);
                self.clause(&[!ctor, !interface]);
                self.clause(&[!ctor, !annotation]);
                self.clause(&[!ctor, !m_abs]);
                self.clause(&[!ctor, !m_stat]);
            }
            // Constructors are named after the class, so at most one.
            for a in 0..ctors.len() {
                for b in a + 1..ctors.len() {
                    self.clause(&[!ctors[a], !ctors[b]]);
                }
            }
            if scope.pruning {
                for w in method_present.windows(2) {
                    self.clause(&[!w[1], w[0]]);
                }
                for w in fields.windows(2) {
                    self.clause(&[!w[1], w[0]]);
                }
            }
            // Edges only point at lower slots, so no cycle can arise.
            for (j, &e) in extends.iter().enumerate() {
                let target_class = self.slots[j].kind[ki(ClassifierKind::Class)];
                self.clause(&[!e, class]);
                self.clause(&[!e, target_class]);
            }
            for a in 0..extends.len() {
                for b in a + 1..extends.len() {
                    self.clause(&[!extends[a], !extends[b]]);
                }
            }
            for (j, &e) in implements.iter().enumerate() {
                let t = &self.slots[j].kind;
                let (ti, ta) = (t[ki(ClassifierKind::Interface)], t[ki(ClassifierKind::Annotation)]);
                self.clause(&[!e, ti, ta]);
            }
        }
        // Slots are interchangeable without inheritance: order them by kind.
        if scope.pruning && !scope.inheritance {
            for i in 1..self.slots.len() {
                for a in 0..4 {
                    for b in 0..a {
                        let (x, y) = (self.slots[i - 1].kind[a], self.slots[i].kind[b]);
                        self.clause(&[!x, !y]);
                    }
                }
            }
        }
    }

    fn slot_list(&self, i: usize) -> Vec<Slot> {
        let c = &self.slots[i];
        let mut out = vec![Slot::Classifier(i)];
        out.extend((0..c.methods.len()).map(|j| Slot::Method(i, j)));
        out.extend((0..c.fields.len()).map(|j| Slot::Field(i, j)));
        out
    }

    fn all_slots(&self) -> Vec<Slot> {
        (0..self.slots.len()).flat_map(|i| self.slot_list(i)).collect()
    }

    fn on(&self, s: Slot, a: usize) -> Lit {
        match s {
            Slot::Classifier(i) => self.slots[i].on[a],
            Slot::Method(i, j) => self.slots[i].methods[j].on[a],
            Slot::Field(i, j) => self.slots[i].fields[j].on[a],
        }
    }

    fn present(&self, s: Slot) -> F {
        match s {
            Slot::Classifier(_) => F::Const(true),
            Slot::Method(i, j) => F::Lit(self.slots[i].methods[j].present),
            Slot::Field(i, j) => F::Lit(self.slots[i].fields[j].present),
        }
    }

    fn is_type(&self, s: Slot, t: TargetType) -> F {
        match s {
            Slot::Classifier(i) => match ClassifierKind::from_target(t) {
                Some(k) => F::Lit(self.slots[i].kind[kind_index(k)]),
                None => F::Const(false),
            },
            Slot::Method(i, j) => {
                let ctor = self.slots[i].methods[j].ctor;
                match t {
                    TargetType::Constructor => F::Lit(ctor),
                    TargetType::Method => F::Lit(!ctor),
                    _ => F::Const(false),
                }
            }
            Slot::Field(..) => F::Const(t == TargetType::Field),
        }
    }

    fn flag(b: Option<bool>, l: Option<Lit>) -> F {
        match (b, l) {
            (None, _) => F::Const(true),
            (Some(want), None) => F::Const(!want),
            (Some(true), Some(l)) => F::Lit(l),
            (Some(false), Some(l)) => F::Lit(!l),
        }
    }

    fn mods(&self, s: Slot, m: &ModifierTest) -> F {
        let (vis, abs, stat, fin) = match s {
            Slot::Classifier(i) => {
                let c = &self.slots[i];
                (c.vis, Some(c.is_abstract), c.is_static, c.is_final)
            }
            Slot::Method(i, j) => {
                let v = &self.slots[i].methods[j];
                (v.vis, Some(v.is_abstract), v.is_static, v.is_final)
            }
            Slot::Field(i, j) => {
                let v = &self.slots[i].fields[j];
                (v.vis, None, v.is_static, v.is_final)
            }
        };
        F::and(vec![
            m.visibility.map_or(F::Const(true), |v| F::Lit(vis[vis_index(v)])),
            Self::flag(m.is_abstract, abs),
            Self::flag(m.is_static, Some(stat)),
            Self::flag(m.is_final, Some(fin)),
        ])
    }

    fn carries(&self, s: Slot, ann: &str) -> F {
        match self.anns.iter().position(|a| a == ann) {
            Some(a) => F::Lit(self.on(s, a)),
            None => F::Const(false),
        }
    }

    fn carries_opt(&self, s: Slot, ann: &Option<String>) -> F {
        ann.as_deref().map_or(F::Const(true), |a| self.carries(s, a))
    }

    fn test(&self, s: Slot, t: &ElementTest) -> F {
        F::and(vec![
            t.target.map_or(F::Const(true), |ty| self.is_type(s, ty)),
            self.mods(s, &t.mods),
            self.carries_opt(s, &t.co_ann),
        ])
    }

    fn members(&self, i: usize) -> Vec<Slot> {
        self.slot_list(i).into_iter().skip(1).collect()
    }

    fn member_witness(&self, s: Slot, i: usize, d: &ElementTest) -> F {
        if d.is_bare() {
            return self.carries_opt(s, &d.co_ann);
        }
        F::or(self.members(i).into_iter().map(|m| F::and(vec![self.present(m), self.test(m, d)])).collect())
    }

    fn owner_match(&self, s: Slot, d: &ElementTest) -> F {
        if d.is_bare() {
            return self.carries_opt(s, &d.co_ann);
        }
        match s {
            Slot::Classifier(_) => F::Const(false),
            Slot::Method(i, _) | Slot::Field(i, _) => self.test(Slot::Classifier(i), d),
        }
    }

    fn applies(&self, s: Slot, scope: Option<TargetType>) -> F {
        scope.map_or(F::Const(true), |t| self.is_type(s, t))
    }

    /// Mirrors the evaluator: the formula holds iff a use on `s` satisfies `p`.
    fn predicate(&self, s: Slot, p: &Predicate) -> F {
        match p {
            Predicate::TargetCondition { disjuncts } => {
                let any = F::or(disjuncts.iter().map(|d| self.test(s, d)).collect());
                if disjuncts.iter().any(|d| d.target.is_none()) {
                    return any;
                }
                let mut types: Vec<TargetType> = disjuncts.iter().filter_map(|d| d.target).collect();
                types.dedup();
                let none_applicable = F::and(types.iter().map(|&t| self.is_type(s, t).not()).collect());
                F::or(vec![none_applicable, any])
            }
            Predicate::ForbiddenTargetCondition { conjuncts } => {
                F::and(conjuncts.iter().map(|c| self.test(s, c)).collect()).not()
            }
            Predicate::SameElementCoOccurrence { scope, anns, polarity } => {
                let body = match polarity {
                    Polarity::Require => F::or(anns.iter().map(|a| self.carries(s, a)).collect()),
                    Polarity::Forbid => F::and(anns.iter().map(|a| self.carries(s, a)).collect()).not(),
                };
                F::implies(self.applies(s, *scope), body)
            }
            Predicate::MemberExists { scope, disjuncts } => {
                let Slot::Classifier(i) = s else { return F::Const(true) };
                let body = F::or(disjuncts.iter().map(|d| self.member_witness(s, i, d)).collect());
                F::implies(self.is_type(s, *scope), body)
            }
            Predicate::MemberForAll { scope, disjuncts } => {
                let Slot::Classifier(i) = s else { return F::Const(true) };
                let body = F::or(
                    disjuncts
                        .iter()
                        .map(|d| match d.target {
                            None => self.carries_opt(s, &d.co_ann),
                            Some(mt) => F::and(
                                self.members(i)
                                    .into_iter()
                                    .map(|m| {
                                        F::implies(F::and(vec![self.present(m), self.is_type(m, mt)]), self.test(m, d))
                                    })
                                    .collect(),
                            ),
                        })
                        .collect(),
                );
                F::implies(self.is_type(s, *scope), body)
            }
            Predicate::MemberForbidden { scope, conjuncts } => {
                let Slot::Classifier(i) = s else { return F::Const(true) };
                let body = F::and(conjuncts.iter().map(|d| self.member_witness(s, i, d)).collect()).not();
                F::implies(self.is_type(s, *scope), body)
            }
            Predicate::OwnerCondition { scope, tests, polarity } => {
                let body = match polarity {
                    Polarity::Require => F::or(tests.iter().map(|d| self.owner_match(s, d)).collect()),
                    Polarity::Forbid => F::and(tests.iter().map(|d| self.owner_match(s, d)).collect()).not(),
                };
                F::implies(self.is_type(s, *scope), body)
            }
        }
    }

    fn demand(&self, s: Slot, d: &Demand) -> F {
        let mut parts = vec![self.present(s)];
        if let Some(t) = d.target {
            parts.push(self.is_type(s, t));
        }
        parts.push(self.mods(s, &d.mods));
        parts.extend(d.anns.iter().map(|a| self.carries(s, a)));
        F::and(parts)
    }

    /// Returns a literal that implies `f` (one-sided Tseitin).
    fn lit_for(&mut self, f: &F) -> Lit {
        match f {
            F::Const(true) => self.truth,
            F::Const(false) => !self.truth,
            F::Lit(l) => *l,
            F::And(parts) => {
                let ls: Vec<Lit> = parts.iter().map(|p| self.lit_for(p)).collect();
                let x = self.fresh();
                for l in ls {
                    self.clause(&[!x, l]);
                }
                x
            }
            F::Or(parts) => {
                let mut c: Vec<Lit> = parts.iter().map(|p| self.lit_for(p)).collect();
                let x = self.fresh();
                c.push(!x);
                self.clause(&c);
                x
            }
        }
    }

    /// Adds `f` as a hard constraint.
    fn require(&mut self, f: F) {
        match f {
            F::And(parts) => {
                for p in parts {
                    self.require(p);
                }
            }
            F::Or(parts) => {
                let c: Vec<Lit> = parts.iter().map(|p| self.lit_for(p)).collect();
                self.clause(&c);
            }
            other => {
                let l = self.lit_for(&other);
                self.clause(&[l]);
            }
        }
    }

    fn placement(&mut self, ir: &ConstraintIR, scope: &Scope) {
        let slots = self.all_slots();
        for (a, name) in self.anns.clone().iter().enumerate() {
            let def = ir.get(name);
            for &s in &slots {
                let on = self.on(s, a);
                if let Some(def) = def {
                    let ok = F::or(def.allowed.iter().map(|&t| self.is_type(s, t)).collect());
                    self.require(F::implies(F::Lit(on), ok));
                }
            }
            let lits: Vec<Lit> = slots.iter().map(|&s| self.on(s, a)).collect();
            let min = if def.is_some() && !scope.relaxed.contains(name) { scope.ann_min as usize } else { 0 };
            self.at_least(&lits, min);
            self.at_most(&lits, scope.ann_max as usize);
        }
    }

    fn predicates(&mut self, ir: &ConstraintIR) {
        let slots = self.all_slots();
        for (a, name) in self.anns.clone().iter().enumerate() {
            let Some(def) = ir.get(name) else { continue };
            for &s in &slots {
                let on = self.on(s, a);
                for p in &def.predicates {
                    let f = self.predicate(s, &p.predicate);
                    self.require(F::implies(F::Lit(on), f));
                }
            }
        }
    }

    /// Sequential-counter encoding of `sum(lits) <= k`.
    fn at_most(&mut self, lits: &[Lit], k: usize) {
        let n = lits.len();
        if k >= n {
            return;
        }
        if k == 0 {
            for &l in lits {
                self.clause(&[!l]);
            }
            return;
        }
        let s: Vec<Vec<Lit>> = (0..n - 1).map(|_| (0..k).map(|_| self.fresh()).collect()).collect();
        self.clause(&[!lits[0], s[0][0]]);
        for j in 1..k {
            self.clause(&[!s[0][j]]);
        }
        for i in 1..n - 1 {
            self.clause(&[!lits[i], s[i][0]]);
            self.clause(&[!s[i - 1][0], s[i][0]]);
            for j in 1..k {
                self.clause(&[!lits[i], !s[i - 1][j - 1], s[i][j]]);
                self.clause(&[!s[i - 1][j], s[i][j]]);
            }
            self.clause(&[!lits[i], !s[i - 1][k - 1]]);
        }
        self.clause(&[!lits[n - 1], !s[n - 2][k - 1]]);
    }

    fn at_least(&mut self, lits: &[Lit], k: usize) {
        match k {
            0 => {}
            1 => self.clause(lits),
            _ if k > lits.len() => self.clause(&[]),
            _ => {
                let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
                self.at_most(&neg, lits.len() - k);
            }
        }
    }

    /// Reads the satisfying assignment back as a program model.
    pub fn decode(&self) -> ProgramModel {
        let s = &self.solver;
        let vis_of = |v: &[Lit; 4]| Visibility::ALL[v.iter().position(|&l| s.lit_true(l)).unwrap_or(2)];
        let mut model = ProgramModel::default();
        let names: Vec<String> = (0..self.slots.len()).map(|i| format!("C{}", i + 1)).collect();
        for (i, c) in self.slots.iter().enumerate() {
            let kind = ClassifierKind::ALL[c.kind.iter().position(|&l| s.lit_true(l)).unwrap_or(0)];
            let mut cl = Classifier::new(&names[i], kind);
            cl.visibility = vis_of(&c.vis);
            cl.is_abstract = kind == ClassifierKind::Class && s.lit_true(c.is_abstract);
            cl.is_final = s.lit_true(c.is_final);
            cl.is_static = s.lit_true(c.is_static);
            cl.extends = c.extends.iter().position(|&l| s.lit_true(l)).map(|j| names[j].clone());
            cl.implements =
                c.implements.iter().enumerate().filter(|(_, &l)| s.lit_true(l)).map(|(j, _)| names[j].clone()).collect();
            let path = ElementPath::Classifier(cl.name.clone());
            for (a, &l) in c.on.iter().enumerate() {
                if s.lit_true(l) {
                    model.annotation_uses.push(AnnotationUse::new(&self.anns[a], path.clone()));
                }
            }
            let mut n = 0;
            for m in c.methods.iter().filter(|m| s.lit_true(m.present)) {
                let ctor = s.lit_true(m.ctor);
                let name = if ctor {
                    cl.name.clone()
                } else {
                    n += 1;
                    format!("m{n}")
                };
                cl.methods.push(Method {
                    name: name.clone(),
                    visibility: vis_of(&m.vis),
                    is_abstract: s.lit_true(m.is_abstract),
                    is_static: s.lit_true(m.is_static),
                    is_final: s.lit_true(m.is_final),
                    is_constructor: ctor,
                });
                let path = ElementPath::Method(cl.name.clone(), name);
                for (a, &l) in m.on.iter().enumerate() {
                    if s.lit_true(l) {
                        model.annotation_uses.push(AnnotationUse::new(&self.anns[a], path.clone()));
                    }
                }
            }
            for (j, f) in c.fields.iter().filter(|f| s.lit_true(f.present)).enumerate() {
                let name = format!("f{}", j + 1);
                cl.fields.push(Field {
                    name: name.clone(),
                    visibility: vis_of(&f.vis),
                    is_static: s.lit_true(f.is_static),
                    is_final: s.lit_true(f.is_final),
                });
                let path = ElementPath::Field(cl.name.clone(), name);
                for (a, &l) in f.on.iter().enumerate() {
                    if s.lit_true(l) {
                        model.annotation_uses.push(AnnotationUse::new(&self.anns[a], path.clone()));
                    }
                }
            }
            model.classifiers.push(cl);
        }
        model
    }
}
