//! Abstract syntax of Ann source files.

use std::fmt;

use crate::diag::Span;
use crate::model::Visibility;

#[derive(Debug, Clone, PartialEq)]
pub struct AnnSourceFile {
    pub package: Option<String>,
    pub annotations: Vec<AnnotationDef>,
    pub source_path: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Retention {
    Runtime,
    Class,
    Source,
    /// No retention keyword; code generation falls back to the Java default (`CLASS`).
    Unspecified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationDef {
    pub name: String,
    pub retention: Retention,
    pub attributes: Vec<AttributeDef>,
    pub constraints: Vec<ConstraintDef>,
    pub span: Span,
}

impl AnnotationDef {
    pub fn attribute(&self, name: &str) -> Option<&AttributeDef> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AttrKind {
    ClassRef,
    String,
    Int,
    Long,
    Short,
    Float,
    Double,
    Char,
    Boolean,
    Byte,
    /// An enum or annotation type declared outside Ann.
    External(String),
}

impl AttrKind {
    pub fn keyword(&self) -> &str {
        match self {
            AttrKind::ClassRef => "Class",
            AttrKind::String => "String",
            AttrKind::Int => "int",
            AttrKind::Long => "long",
            AttrKind::Short => "short",
            AttrKind::Float => "float",
            AttrKind::Double => "double",
            AttrKind::Char => "char",
            AttrKind::Boolean => "boolean",
            AttrKind::Byte => "byte",
            AttrKind::External(name) => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeDef {
    pub name: String,
    pub kind: AttrKind,
    pub is_array: bool,
    pub default: Option<DefaultValue>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DefaultValue {
    /// `Name.class`
    ClassLiteral(String),
    Str(String),
    Integer(i64),
    /// Decimal literal exactly as written (may carry an `f`/`d` suffix).
    Real(String),
    Character(char),
    Boolean(bool),
    /// `Type.CONSTANT`
    EnumRef(String, String),
    AnnLiteral { name: String, args: AnnArgs },
    Array(Vec<DefaultValue>),
}

impl DefaultValue {
    pub fn real_value(text: &str) -> f64 {
        let t: String = text.chars().filter(|c| !matches!(c, '_' | 'f' | 'F' | 'd' | 'D')).collect();
        t.parse().unwrap_or(f64::NAN)
    }

    /// Variant name, used for homogeneity checks and diagnostics.
    pub fn variant(&self) -> &'static str {
        match self {
            DefaultValue::ClassLiteral(_) => "class literal",
            DefaultValue::Str(_) => "string",
            DefaultValue::Integer(_) => "integer",
            DefaultValue::Real(_) => "decimal",
            DefaultValue::Character(_) => "character",
            DefaultValue::Boolean(_) => "boolean",
            DefaultValue::EnumRef(..) => "enum constant",
            DefaultValue::AnnLiteral { .. } => "annotation",
            DefaultValue::Array(_) => "array",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnnArgs {
    /// `@Name`
    None,
    /// `@Name(value)`
    Single(Box<DefaultValue>),
    /// `@Name(k = v, ...)`
    Pairs(Vec<(String, DefaultValue)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    Require,
    Forbid,
}

impl ConstraintKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::Require => "require",
            ConstraintKind::Forbid => "forbid",
        }
    }

    /// Word joining statements: requires are disjunctions, forbids conjunctions.
    pub fn joiner(self) -> &'static str {
        match self {
            ConstraintKind::Require => "or",
            ConstraintKind::Forbid => "and",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintDef {
    pub kind: ConstraintKind,
    /// `at T:` prefix.
    pub scope: Option<TargetType>,
    /// `require all`; only legal on scoped requires.
    pub all: bool,
    pub statements: Vec<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub ann_ref: Option<String>,
    pub modifiers: Modifiers,
    pub target: Option<TargetType>,
    pub span: Span,
}

impl Statement {
    /// A statement consisting only of `@Name`.
    pub fn is_bare_annotation(&self) -> bool {
        self.target.is_none()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Modifiers {
    pub visibility: Option<Visibility>,
    pub is_final: bool,
    pub is_abstract: bool,
    pub is_static: bool,
}

impl Modifiers {
    pub fn is_empty(&self) -> bool {
        *self == Modifiers::default()
    }

    /// Modifier words in grammar order: visibility, final, abstract, static.
    pub fn words(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if let Some(v) = self.visibility {
            out.push(v.keyword());
        }
        if self.is_final {
            out.push("final");
        }
        if self.is_abstract {
            out.push("abstract");
        }
        if self.is_static {
            out.push("static");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetType {
    Class,
    Interface,
    Annotation,
    Enum,
    Method,
    Field,
    Constructor,
}

impl TargetType {
    pub const ALL: [TargetType; 7] = [
        TargetType::Class,
        TargetType::Interface,
        TargetType::Annotation,
        TargetType::Enum,
        TargetType::Method,
        TargetType::Field,
        TargetType::Constructor,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            TargetType::Class => "class",
            TargetType::Interface => "interface",
            TargetType::Annotation => "annotation",
            TargetType::Enum => "enum",
            TargetType::Method => "method",
            TargetType::Field => "field",
            TargetType::Constructor => "constructor",
        }
    }

    /// Types that own members.
    pub fn is_container(self) -> bool {
        matches!(self, TargetType::Class | TargetType::Interface | TargetType::Annotation | TargetType::Enum)
    }

    pub fn is_member(self) -> bool {
        !self.is_container()
    }
}

impl fmt::Display for TargetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

pub(crate) fn clear_span(span: &mut Span) {
    *span = Span::default();
}

impl AnnSourceFile {
    /// Copy with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> AnnSourceFile {
        let mut f = self.clone();
        for a in &mut f.annotations {
            clear_span(&mut a.span);
            for at in &mut a.attributes {
                clear_span(&mut at.span);
            }
            for c in &mut a.constraints {
                clear_span(&mut c.span);
                for s in &mut c.statements {
                    clear_span(&mut s.span);
                }
            }
        }
        f
    }
}
