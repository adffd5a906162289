//! Simplified Java program model: classifiers, their members, and the
//! annotation uses attached to them.

mod json;
mod wellformed;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::syntax::ast::TargetType;

pub use json::ModelError;
pub use wellformed::{well_formed, ModelDiagnostic, WfRule};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Protected,
    #[default]
    Package,
    Private,
}

impl Visibility {
    pub const ALL: [Visibility; 4] = [Visibility::Public, Visibility::Protected, Visibility::Package, Visibility::Private];

    pub fn keyword(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Protected => "protected",
            Visibility::Package => "package",
            Visibility::Private => "private",
        }
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    #[default]
    Class,
    Interface,
    Annotation,
    Enum,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] =
        [ClassifierKind::Class, ClassifierKind::Interface, ClassifierKind::Annotation, ClassifierKind::Enum];

    pub fn target_type(self) -> TargetType {
        match self {
            ClassifierKind::Class => TargetType::Class,
            ClassifierKind::Interface => TargetType::Interface,
            ClassifierKind::Annotation => TargetType::Annotation,
            ClassifierKind::Enum => TargetType::Enum,
        }
    }

    pub fn from_target(t: TargetType) -> Option<ClassifierKind> {
        ClassifierKind::ALL.into_iter().find(|k| k.target_type() == t)
    }

    /// Java declaration keyword.
    pub fn java_keyword(self) -> &'static str {
        match self {
            ClassifierKind::Class => "class",
            ClassifierKind::Interface => "interface",
            ClassifierKind::Annotation => "@interface",
            ClassifierKind::Enum => "enum",
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_package(v: &Visibility) -> bool {
    *v == Visibility::Package
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classifier {
    pub name: String,
    #[serde(default)]
    pub kind: ClassifierKind,
    #[serde(default, skip_serializing_if = "is_package")]
    pub visibility: Visibility,
    #[serde(rename = "abstract", default, skip_serializing_if = "is_false")]
    pub is_abstract: bool,
    #[serde(rename = "final", default, skip_serializing_if = "is_false")]
    pub is_final: bool,
    #[serde(rename = "static", default, skip_serializing_if = "is_false")]
    pub is_static: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extends: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub implements: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<Method>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<Field>,
}

impl Classifier {
    pub fn new(name: &str, kind: ClassifierKind) -> Self {
        Classifier { name: name.to_string(), kind, ..Default::default() }
    }

    /// Interfaces and annotation types are implicitly abstract.
    pub fn effective_abstract(&self) -> bool {
        self.is_abstract || matches!(self.kind, ClassifierKind::Interface | ClassifierKind::Annotation)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Method {
    pub name: String,
    #[serde(default, skip_serializing_if = "is_package")]
    pub visibility: Visibility,
    #[serde(rename = "abstract", default, skip_serializing_if = "is_false")]
    pub is_abstract: bool,
    #[serde(rename = "static", default, skip_serializing_if = "is_false")]
    pub is_static: bool,
    #[serde(rename = "final", default, skip_serializing_if = "is_false")]
    pub is_final: bool,
    #[serde(rename = "constructor", default, skip_serializing_if = "is_false")]
    pub is_constructor: bool,
}

impl Method {
    pub fn new(name: &str) -> Self {
        Method { name: name.to_string(), ..Default::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Field {
    pub name: String,
    #[serde(default, skip_serializing_if = "is_package")]
    pub visibility: Visibility,
    #[serde(rename = "static", default, skip_serializing_if = "is_false")]
    pub is_static: bool,
    #[serde(rename = "final", default, skip_serializing_if = "is_false")]
    pub is_final: bool,
}

impl Field {
    pub fn new(name: &str) -> Self {
        Field { name: name.to_string(), ..Default::default() }
    }
}

/// Path of an element: `C`, `C#method:m` or `C#field:f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementPath {
    Classifier(String),
    Method(String, String),
    Field(String, String),
}

impl ElementPath {
    pub fn classifier(&self) -> &str {
        match self {
            ElementPath::Classifier(c) | ElementPath::Method(c, _) | ElementPath::Field(c, _) => c,
        }
    }
}

impl fmt::Display for ElementPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementPath::Classifier(c) => f.write_str(c),
            ElementPath::Method(c, m) => write!(f, "{c}#method:{m}"),
            ElementPath::Field(c, x) => write!(f, "{c}#field:{x}"),
        }
    }
}

impl FromStr for ElementPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("malformed element path `{s}`");
        match s.split_once('#') {
            None if !s.is_empty() => Ok(ElementPath::Classifier(s.to_string())),
            None => Err(bad()),
            Some((c, rest)) => {
                let (kind, name) = rest.split_once(':').ok_or_else(bad)?;
                if c.is_empty() || name.is_empty() {
                    return Err(bad());
                }
                match kind {
                    "method" => Ok(ElementPath::Method(c.to_string(), name.to_string())),
                    "field" => Ok(ElementPath::Field(c.to_string(), name.to_string())),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl Serialize for ElementPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationUse {
    pub ann: String,
    pub target: ElementPath,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, serde_json::Value>,
}

impl AnnotationUse {
    pub fn new(ann: &str, target: ElementPath) -> Self {
        AnnotationUse { ann: ann.to_string(), target, values: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramModel {
    #[serde(default)]
    pub classifiers: Vec<Classifier>,
    #[serde(default, rename = "annotations")]
    pub annotation_uses: Vec<AnnotationUse>,
}

/// Index-based handle to an element of a [`ProgramModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementRef {
    Classifier(usize),
    Method(usize, usize),
    Field(usize, usize),
}

impl ElementRef {
    pub fn owner(self) -> Option<usize> {
        match self {
            ElementRef::Classifier(_) => None,
            ElementRef::Method(c, _) | ElementRef::Field(c, _) => Some(c),
        }
    }

    pub fn classifier_index(self) -> usize {
        match self {
            ElementRef::Classifier(c) | ElementRef::Method(c, _) | ElementRef::Field(c, _) => c,
        }
    }
}

impl ProgramModel {
    pub fn classifier(&self, name: &str) -> Option<usize> {
        self.classifiers.iter().position(|c| c.name == name)
    }

    pub fn resolve(&self, path: &ElementPath) -> Option<ElementRef> {
        let c = self.classifier(path.classifier())?;
        let cl = &self.classifiers[c];
        match path {
            ElementPath::Classifier(_) => Some(ElementRef::Classifier(c)),
            ElementPath::Method(_, m) => cl.methods.iter().position(|x| &x.name == m).map(|i| ElementRef::Method(c, i)),
            ElementPath::Field(_, f) => cl.fields.iter().position(|x| &x.name == f).map(|i| ElementRef::Field(c, i)),
        }
    }

    pub fn path(&self, el: ElementRef) -> ElementPath {
        match el {
            ElementRef::Classifier(c) => ElementPath::Classifier(self.classifiers[c].name.clone()),
            ElementRef::Method(c, m) => {
                let cl = &self.classifiers[c];
                ElementPath::Method(cl.name.clone(), cl.methods[m].name.clone())
            }
            ElementRef::Field(c, f) => {
                let cl = &self.classifiers[c];
                ElementPath::Field(cl.name.clone(), cl.fields[f].name.clone())
            }
        }
    }

    pub fn target_type(&self, el: ElementRef) -> TargetType {
        match el {
            ElementRef::Classifier(c) => self.classifiers[c].kind.target_type(),
            ElementRef::Method(c, m) if self.classifiers[c].methods[m].is_constructor => TargetType::Constructor,
            ElementRef::Method(..) => TargetType::Method,
            ElementRef::Field(..) => TargetType::Field,
        }
    }

    pub fn visibility(&self, el: ElementRef) -> Visibility {
        match el {
            ElementRef::Classifier(c) => self.classifiers[c].visibility,
            ElementRef::Method(c, m) => self.classifiers[c].methods[m].visibility,
            ElementRef::Field(c, f) => self.classifiers[c].fields[f].visibility,
        }
    }

    /// Fields are never abstract; interfaces and annotation types always are.
    pub fn is_abstract(&self, el: ElementRef) -> bool {
        match el {
            ElementRef::Classifier(c) => self.classifiers[c].effective_abstract(),
            ElementRef::Method(c, m) => self.classifiers[c].methods[m].is_abstract,
            ElementRef::Field(..) => false,
        }
    }

    pub fn is_static(&self, el: ElementRef) -> bool {
        match el {
            ElementRef::Classifier(c) => self.classifiers[c].is_static,
            ElementRef::Method(c, m) => self.classifiers[c].methods[m].is_static,
            ElementRef::Field(c, f) => self.classifiers[c].fields[f].is_static,
        }
    }

    pub fn is_final(&self, el: ElementRef) -> bool {
        match el {
            ElementRef::Classifier(c) => self.classifiers[c].is_final,
            ElementRef::Method(c, m) => self.classifiers[c].methods[m].is_final,
            ElementRef::Field(c, f) => self.classifiers[c].fields[f].is_final,
        }
    }

    /// Every element in declaration order: each classifier, then its
    /// methods, then its fields.
    pub fn elements(&self) -> Vec<ElementRef> {
        let mut out = Vec::new();
        for (c, cl) in self.classifiers.iter().enumerate() {
            out.push(ElementRef::Classifier(c));
            out.extend((0..cl.methods.len()).map(|m| ElementRef::Method(c, m)));
            out.extend((0..cl.fields.len()).map(|f| ElementRef::Field(c, f)));
        }
        out
    }

    /// Members of classifier `c` (methods, then fields).
    pub fn members(&self, c: usize) -> impl Iterator<Item = ElementRef> + '_ {
        let cl = &self.classifiers[c];
        (0..cl.methods.len())
            .map(move |m| ElementRef::Method(c, m))
            .chain((0..cl.fields.len()).map(move |f| ElementRef::Field(c, f)))
    }

    /// Whether an annotation named `ann` is attached to `el`.
    pub fn carries(&self, el: ElementRef, ann: &str) -> bool {
        let path = self.path(el);
        self.annotation_uses.iter().any(|u| u.ann == ann && u.target == path)
    }

    pub fn uses_of<'a>(&'a self, ann: &'a str) -> impl Iterator<Item = &'a AnnotationUse> + 'a {
        self.annotation_uses.iter().filter(move |u| u.ann == ann)
    }

    pub fn member_count(&self) -> usize {
        self.classifiers.iter().map(|c| c.methods.len() + c.fields.len()).sum()
    }
}

/// Elements whose target type is `t`, in declaration order. `method`
/// excludes constructors; `constructor` selects only them.
pub fn elements_of(model: &ProgramModel, t: TargetType) -> Vec<ElementRef> {
    model.elements().into_iter().filter(|&e| model.target_type(e) == t).collect()
}
