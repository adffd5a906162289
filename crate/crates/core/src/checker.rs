//! Placement checking of a concrete annotated model, the offline
//! counterpart of running the generated processors.

use std::fmt;

use serde::Serialize;

use crate::compiler::{evaluate_lenient, ConstraintIR};
use crate::diag::Severity;
use crate::model::{well_formed, ProgramModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlacementDiagnostic {
    #[serde(serialize_with = "severity_str")]
    pub severity: Severity,
    pub message: String,
    pub element_path: String,
    /// Empty for well-formedness and decode diagnostics.
    pub ann_name: String,
    /// Predicate name, or the rule code for well-formedness diagnostics.
    pub predicate_name: String,
}

fn severity_str<S: serde::Serializer>(s: &Severity, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&s.to_string())
}

impl PlacementDiagnostic {
    /// `ann/predicate` for placement errors, the rule code otherwise.
    pub fn code(&self) -> String {
        if self.ann_name.is_empty() {
            self.predicate_name.clone()
        } else {
            format!("{}/{}", self.ann_name, self.predicate_name)
        }
    }
}

impl fmt::Display for PlacementDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.element_path.is_empty() { "<model>" } else { &self.element_path };
        write!(f, "{path}: {}[{}]: {}", self.severity, self.code(), self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    /// Well-formedness diagnostics first, then placement errors sorted by
    /// (path, annotation, predicate).
    pub diagnostics: Vec<PlacementDiagnostic>,
    /// Uses of annotations the set does not know; these are skipped.
    pub notes: Vec<PlacementDiagnostic>,
}

impl CheckReport {
    pub fn error_count(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error).count()
    }

    pub fn is_clean(&self) -> bool {
        self.error_count() == 0
    }
}

pub fn placement_message(ann: &str, description: &str) -> String {
    format!("The annotation @{ann} is disallowed for this location: {description}.")
}

/// Checks every annotation use in `model` against the compiled set.
pub fn check(model: &ProgramModel, ir: &ConstraintIR) -> CheckReport {
    let mut report = CheckReport::default();
    for d in well_formed(model) {
        report.diagnostics.push(PlacementDiagnostic {
            severity: Severity::Error,
            message: d.message,
            element_path: d.path,
            ann_name: String::new(),
            predicate_name: d.rule.code().to_string(),
        });
    }
    let (violations, unknown) = match evaluate_lenient(ir, model) {
        Ok(r) => r,
        Err(e) => {
            report.diagnostics.push(fatal(e.to_string()));
            return report;
        }
    };
    let mut placement: Vec<PlacementDiagnostic> = violations
        .into_iter()
        .map(|v| PlacementDiagnostic {
            severity: Severity::Error,
            message: placement_message(&v.ann, &v.description),
            element_path: v.target.to_string(),
            ann_name: v.ann,
            predicate_name: v.predicate,
        })
        .collect();
    placement.sort_by(|a, b| {
        (&a.element_path, &a.ann_name, &a.predicate_name).cmp(&(&b.element_path, &b.ann_name, &b.predicate_name))
    });
    report.diagnostics.extend(placement);
    report.notes = unknown
        .into_iter()
        .map(|(ann, path)| PlacementDiagnostic {
            severity: Severity::Note,
            message: format!("@{ann} is not part of the checked annotation set; skipped"),
            element_path: path.to_string(),
            ann_name: ann,
            predicate_name: "unknown".to_string(),
        })
        .collect();
    report
}

/// Decodes a JSON model and checks it. Undecodable input yields a single
/// fatal diagnostic.
pub fn check_json(text: &str, ir: &ConstraintIR) -> CheckReport {
    match ProgramModel::from_json(text) {
        Ok(m) => check(&m, ir),
        Err(e) => CheckReport { diagnostics: vec![fatal(e.to_string())], notes: vec![] },
    }
}

fn fatal(message: String) -> PlacementDiagnostic {
    PlacementDiagnostic {
        severity: Severity::Error,
        message,
        element_path: String::new(),
        ann_name: String::new(),
        predicate_name: "model/invalid".to_string(),
    }
}
