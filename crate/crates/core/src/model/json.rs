//! JSON encoding of program models and structural validation on decode.

use std::collections::HashSet;

use thiserror::Error;

use super::{ClassifierKind, ProgramModel};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid model JSON: {0}")]
    Json(String),
    #[error("duplicate classifier `{0}`")]
    DuplicateClassifier(String),
    #[error("duplicate {kind} `{name}` in `{owner}`")]
    DuplicateMember { owner: String, kind: &'static str, name: String },
    #[error("`{from}` refers to unknown classifier `{to}`")]
    UnknownClassifier { from: String, to: String },
    #[error("annotation use @{ann} targets missing element `{target}`")]
    UnresolvedTarget { ann: String, target: String },
    #[error("`{0}`: {1}")]
    Structure(String, &'static str),
}

impl ProgramModel {
    pub fn from_json(text: &str) -> Result<ProgramModel, ModelError> {
        let model: ProgramModel = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        model.validate_structure()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("program models always serialize");
        s.push('\n');
        s
    }

    /// Checks the shape constraints every model must satisfy before any
    /// well-formedness rule is meaningful: unique names, resolvable
    /// references, and kind-specific modifier restrictions.
    pub fn validate_structure(&self) -> Result<(), ModelError> {
        let mut names = HashSet::new();
        for c in &self.classifiers {
            if !names.insert(c.name.as_str()) {
                return Err(ModelError::DuplicateClassifier(c.name.clone()));
            }
        }
        for c in &self.classifiers {
            let mut seen = HashSet::new();
            for m in &c.methods {
                if !seen.insert(m.name.as_str()) {
                    return Err(ModelError::DuplicateMember { owner: c.name.clone(), kind: "method", name: m.name.clone() });
                }
            }
            seen.clear();
            for f in &c.fields {
                if !seen.insert(f.name.as_str()) {
                    return Err(ModelError::DuplicateMember { owner: c.name.clone(), kind: "field", name: f.name.clone() });
                }
            }
            if c.kind == ClassifierKind::Interface && c.is_final {
                return Err(ModelError::Structure(c.name.clone(), "interfaces cannot be final"));
            }
            if c.kind == ClassifierKind::Enum && c.is_abstract {
                return Err(ModelError::Structure(c.name.clone(), "enums cannot be abstract"));
            }
            if c.kind == ClassifierKind::Annotation && !c.fields.is_empty() {
                return Err(ModelError::Structure(c.name.clone(), "annotation types cannot declare fields"));
            }
            if let Some(sup) = &c.extends {
                if c.kind != ClassifierKind::Class {
                    return Err(ModelError::Structure(c.name.clone(), "only classes declare a superclass"));
                }
                match self.classifier(sup) {
                    None => return Err(ModelError::UnknownClassifier { from: c.name.clone(), to: sup.clone() }),
                    Some(i) if self.classifiers[i].kind != ClassifierKind::Class => {
                        return Err(ModelError::Structure(c.name.clone(), "superclass must be a class"));
                    }
                    Some(_) => {}
                }
            }
            for i in &c.implements {
                match self.classifier(i) {
                    None => return Err(ModelError::UnknownClassifier { from: c.name.clone(), to: i.clone() }),
                    Some(j) if !matches!(self.classifiers[j].kind, ClassifierKind::Interface | ClassifierKind::Annotation) => {
                        return Err(ModelError::Structure(c.name.clone(), "implemented types must be interfaces"));
                    }
                    Some(_) => {}
                }
            }
        }
        for u in &self.annotation_uses {
            if self.resolve(&u.target).is_none() {
                return Err(ModelError::UnresolvedTarget { ann: u.ann.clone(), target: u.target.to_string() });
            }
        }
        Ok(())
    }
}
