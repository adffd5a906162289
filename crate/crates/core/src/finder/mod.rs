//! Bounded model finding: search for a well-formed program model that uses
//! every annotation and satisfies all compiled constraints.

mod encode;
mod minimize;
pub mod sat;

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use serde::Deserialize;
use thiserror::Error;

use crate::compiler::{ConstraintIR, ModifierTest};
use crate::model::{ClassifierKind, ProgramModel};
use crate::syntax::ast::TargetType;

pub use minimize::{demand_holds, is_witness};

/// Search bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scope {
    /// Uses per defined annotation.
    pub ann_min: u32,
    pub ann_max: u32,
    pub max_classifiers: usize,
    pub max_methods: usize,
    pub max_fields: usize,
    pub allow_interfaces: bool,
    pub allow_enums: bool,
    pub allow_annotation_types: bool,
    /// Generate `extends`/`implements` edges.
    pub inheritance: bool,
    /// Annotations exempt from the minimum-use obligation.
    pub relaxed: BTreeSet<String>,
    pub deadline_ms: Option<u64>,
    /// Symmetry breaking and clause learning; off means plain chronological search.
    pub pruning: bool,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            ann_min: 1,
            ann_max: 2,
            max_classifiers: 3,
            max_methods: 3,
            max_fields: 3,
            allow_interfaces: true,
            allow_enums: false,
            allow_annotation_types: true,
            inheritance: false,
            relaxed: BTreeSet::new(),
            deadline_ms: None,
            pruning: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScopeError {
    #[error("ann_min must be at least 1")]
    ZeroMinimum,
    #[error("ann_max ({max}) is below ann_min ({min})")]
    MaxBelowMin { min: u32, max: u32 },
    #[error("max_classifiers must be at least 1")]
    NoClassifiers,
    #[error("invalid scope file: {0}")]
    Config(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScopeFile {
    ann_min: Option<u32>,
    ann_max: Option<u32>,
    max_classifiers: Option<usize>,
    max_methods: Option<usize>,
    max_fields: Option<usize>,
    deadline_ms: Option<u64>,
    allow_interfaces: Option<bool>,
    allow_enums: Option<bool>,
    inheritance: Option<bool>,
}

impl Scope {
    pub fn validate(&self) -> Result<(), ScopeError> {
        if self.ann_min < 1 {
            return Err(ScopeError::ZeroMinimum);
        }
        if self.ann_max < self.ann_min {
            return Err(ScopeError::MaxBelowMin { min: self.ann_min, max: self.ann_max });
        }
        if self.max_classifiers < 1 {
            return Err(ScopeError::NoClassifiers);
        }
        Ok(())
    }

    /// Overrides fields from `key = value` lines.
    pub fn apply_config(&mut self, text: &str) -> Result<(), ScopeError> {
        let f: ScopeFile = toml::from_str(text).map_err(|e| ScopeError::Config(e.message().to_string()))?;
        macro_rules! set {
            ($($k:ident),*) => { $(if let Some(v) = f.$k { self.$k = v; })* };
        }
        set!(ann_min, ann_max, max_classifiers, max_methods, max_fields, allow_interfaces, allow_enums, inheritance);
        if f.deadline_ms.is_some() {
            self.deadline_ms = f.deadline_ms;
        }
        self.validate()
    }

    pub fn allows_kind(&self, k: ClassifierKind) -> bool {
        match k {
            ClassifierKind::Class => true,
            ClassifierKind::Interface => self.allow_interfaces,
            ClassifierKind::Annotation => self.allow_annotation_types,
            ClassifierKind::Enum => self.allow_enums,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}..{} uses per annotation, up to {} classifiers with {} methods and {} fields each",
            self.ann_min, self.ann_max, self.max_classifiers, self.max_methods, self.max_fields
        )
    }
}

/// An extra obligation: some element matching the test carries all `anns`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Demand {
    pub target: Option<TargetType>,
    pub mods: ModifierTest,
    pub anns: Vec<String>,
}

impl Demand {
    pub fn together(anns: &[&str]) -> Demand {
        Demand { anns: anns.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Branching decisions taken.
    pub candidates: u64,
    /// Conflicts, each cutting off a subtree.
    pub pruned: u64,
    pub elapsed_ms: u64,
    /// Largest classifier count tried.
    pub classifiers_tried: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FinderResult {
    Sat { witness: ProgramModel, stats: SearchStats },
    UnsatWithinScope { stats: SearchStats },
    Timeout { stats: SearchStats },
}

impl FinderResult {
    pub fn stats(&self) -> &SearchStats {
        match self {
            FinderResult::Sat { stats, .. } | FinderResult::UnsatWithinScope { stats } | FinderResult::Timeout { stats } => {
                stats
            }
        }
    }

    pub fn witness(&self) -> Option<&ProgramModel> {
        match self {
            FinderResult::Sat { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, FinderResult::Sat { .. })
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            FinderResult::Sat { .. } => "SAT",
            FinderResult::UnsatWithinScope { .. } => "UNSAT",
            FinderResult::Timeout { .. } => "TIMEOUT",
        }
    }
}

/// Searches classifier counts from 1 upwards and returns the first witness,
/// shrunk greedily.
pub fn find(ir: &ConstraintIR, scope: &Scope, extra: &[Demand]) -> FinderResult {
    let start = Instant::now();
    let deadline = scope.deadline_ms.map(|ms| start + Duration::from_millis(ms));
    let mut stats = SearchStats::default();
    let finish = |mut stats: SearchStats| {
        stats.elapsed_ms = start.elapsed().as_millis() as u64;
        stats
    };
    for k in 1..=scope.max_classifiers {
        stats.classifiers_tried = k;
        let mut enc = encode::Encoding::new(ir, scope, extra, k);
        let r = enc.solver.solve(deadline);
        stats.candidates += enc.solver.stats.decisions;
        stats.pruned += enc.solver.stats.conflicts;
        match r {
            sat::SolveResult::Sat => {
                let raw = enc.decode();
                debug_assert!(is_witness(ir, scope, extra, &raw), "decoded model fails the checks:\n{}", raw.to_json());
                let witness = minimize::minimize(ir, scope, extra, raw);
                return FinderResult::Sat { witness, stats: finish(stats) };
            }
            sat::SolveResult::Unsat => {}
            sat::SolveResult::Unknown => return FinderResult::Timeout { stats: finish(stats) },
        }
    }
    FinderResult::UnsatWithinScope { stats: finish(stats) }
}

/// Human-readable verdict with the bounds and search statistics.
pub fn explain_scope(result: &FinderResult, scope: &Scope) -> String {
    let s = result.stats();
    let tail = format!("({} decisions, {} conflicts, {} ms)", s.candidates, s.pruned, s.elapsed_ms);
    match result {
        FinderResult::Sat { witness, .. } => format!(
            "SAT: found a witness with {} classifiers, {} members and {} annotation uses\nscope: {scope}\n{tail}",
            witness.classifiers.len(),
            witness.member_count(),
            witness.annotation_uses.len()
        ),
        FinderResult::UnsatWithinScope { .. } => format!(
            "UNSAT within scope: no model with {scope} satisfies the constraints\n\
             a larger scope might still admit one\n{tail}"
        ),
        FinderResult::Timeout { .. } => format!(
            "TIMEOUT after {} ms (budget {} ms) before a verdict\nscope: {scope}\n{tail}",
            s.elapsed_ms,
            scope.deadline_ms.unwrap_or(0)
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile, evaluate};
    use crate::model::{well_formed, Visibility};
    use crate::syntax::parse_source;

    fn ir(src: &str) -> ConstraintIR {
        compile(&[parse_source("t.ann", src).unwrap()]).unwrap().ir
    }

    fn check_witness(ir: &ConstraintIR, r: &FinderResult) -> ProgramModel {
        let w = r.witness().expect("expected SAT").clone();
        assert!(well_formed(&w).is_empty());
        assert!(evaluate(ir, &w).unwrap().is_empty());
        w
    }

    const PERSON: &str = "annotation Person { require public class; at class: forbid final field; }";

    #[test]
    fn person_employee_conflict() {
        let bad = ir(&format!("{PERSON} annotation Employee {{ require @Person package class; }}"));
        let r = find(&bad, &Scope::default(), &[]);
        assert!(matches!(r, FinderResult::UnsatWithinScope { .. }), "{r:?}");
        let text = explain_scope(&r, &Scope::default());
        assert!(text.contains("within scope") && text.contains("1..2") && text.contains("3 classifiers"));

        let good = ir(&format!("{PERSON} annotation Employee {{ require @Person class; }}"));
        let r = find(&good, &Scope::default(), &[]);
        let w = check_witness(&good, &r);
        assert_eq!(w.classifiers.len(), 1);
        assert_eq!(w.classifiers[0].visibility, Visibility::Public);
        let anns: Vec<_> = w.annotation_uses.iter().map(|u| u.ann.as_str()).collect();
        assert_eq!(anns, vec!["Person", "Employee"]);
        assert!(explain_scope(&r, &Scope::default()).starts_with("SAT"));
    }

    #[test]
    fn deterministic_and_pruning_safe() {
        let src = "annotation A { require method or field; at method: require @B class; } \
                   annotation B { require class; at class: require public constructor; }";
        let ir = ir(src);
        let scope = Scope { max_classifiers: 2, max_methods: 2, max_fields: 1, ..Scope::default() };
        let a = find(&ir, &scope, &[]);
        let b = find(&ir, &scope, &[]);
        assert_eq!(a.witness(), b.witness());
        check_witness(&ir, &a);
        let slow = find(&ir, &Scope { pruning: false, ..scope }, &[]);
        assert_eq!(slow.is_sat(), a.is_sat());
    }

    #[test]
    fn demands_force_combinations() {
        let ir = ir("annotation A { } annotation B { }");
        let scope = Scope { ann_max: 1, ..Scope::default() };
        let r = find(&ir, &scope, &[Demand::together(&["A", "B"])]);
        let w = check_witness(&ir, &r);
        assert_eq!(w.annotation_uses[0].target, w.annotation_uses[1].target);
    }

    #[test]
    fn zero_deadline_times_out_or_finishes() {
        let ir = ir("annotation A { require class; }");
        let r = find(&ir, &Scope { deadline_ms: Some(0), ..Scope::default() }, &[]);
        assert!(matches!(r, FinderResult::Timeout { .. } | FinderResult::Sat { .. }));
    }

    #[test]
    fn scope_config() {
        let mut s = Scope::default();
        s.apply_config("ann_min = 1\nann_max = 4\nmax_classifiers = 5\ndeadline_ms = 1000\n").unwrap();
        assert_eq!((s.ann_max, s.max_classifiers, s.deadline_ms), (4, 5, Some(1000)));
        assert!(s.apply_config("ann_min = 0").is_err());
        assert!(Scope::default().apply_config("bogus = 1").is_err());
        assert!(Scope::default().apply_config("ann_min = 3\nann_max = 2").is_err());
    }

    #[test]
    fn inheritance_witnesses_stay_well_formed() {
        let ir = ir("annotation A { require abstract class; } annotation B { require interface; }");
        let scope = Scope { inheritance: true, ..Scope::default() };
        check_witness(&ir, &find(&ir, &scope, &[]));
    }
}
