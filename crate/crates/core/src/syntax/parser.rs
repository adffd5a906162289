//! Recursive-descent parser for Ann source files.
//!
//! Errors are recorded as diagnostics and the parser resynchronises at the
//! next `;` (inside an annotation body) or the next `annotation` header (at
//! file level), so one pass reports every independent mistake.

use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{tokenize_with_errors, Keyword, Token, TokenKind};
use crate::diag::{Diagnostic, Span};
use crate::model::Visibility;

/// Names of grammar productions (and their alternatives) recorded while
/// parsing. Used to report corpus coverage of the grammar.
pub const PRODUCTIONS: &[&str] = &[
    "Annotation",
    "Retention:runtime",
    "Retention:class",
    "Retention:source",
    "Constraints",
    "Attribute",
    "Attribute:array",
    "ClassAtt",
    "StringAtt",
    "ExternalAtt",
    "IntAtt",
    "LongAtt",
    "ShortAtt",
    "FloatAtt",
    "DoubleAtt",
    "CharAtt",
    "BooleanAtt",
    "ByteAtt",
    "AnnDefault:bare",
    "AnnDefault:value",
    "AnnDefault:pairs",
    "ClassDefault",
    "EnumDefault",
    "AnnID",
    "KeyValue",
    "AnnValue",
    "AnnArray:empty",
    "AnnArray:items",
    "AnnBasicValue:enum",
    "AnnBasicValue:annotation",
    "AnnBasicValue:float",
    "AnnBasicValue:int",
    "AnnBasicValue:boolean",
    "AnnBasicValue:char",
    "AnnBasicValue:byte",
    "AnnBasicValue:string",
    "Require",
    "Require:at",
    "Require:all",
    "Forbid",
    "Forbid:at",
    "Statement:AnnID",
    "Statement:TgtStatement",
    "TgtStatement:AnnID",
    "Modifiers",
    "Modifiers:final",
    "Modifiers:abstract",
    "Modifiers:static",
    "VisibMod:public",
    "VisibMod:private",
    "VisibMod:protected",
    "VisibMod:package",
    "TargetType:interface",
    "TargetType:class",
    "TargetType:annotation",
    "TargetType:method",
    "TargetType:field",
    "TargetType:constructor",
    "TargetType:enum",
];

/// Parse result together with the set of productions exercised.
pub struct ParseOutcome {
    pub file: Option<AnnSourceFile>,
    pub diagnostics: Vec<Diagnostic>,
    pub coverage: BTreeSet<&'static str>,
}

/// Lexes and parses `source`. Returns the file when no errors were found.
pub fn parse_source(path: &str, source: &str) -> Result<AnnSourceFile, Vec<Diagnostic>> {
    let out = parse_traced(path, source);
    match out.file {
        Some(f) if out.diagnostics.is_empty() => Ok(f),
        _ => Err(out.diagnostics),
    }
}

pub fn parse(tokens: &[Token], path: &str) -> Result<AnnSourceFile, Vec<Diagnostic>> {
    let mut p = Parser::new(tokens, path);
    let file = p.file();
    if p.diags.is_empty() {
        Ok(file)
    } else {
        Err(p.diags)
    }
}

/// Parses arbitrary bytes (invalid UTF-8 is replaced, never rejected).
pub fn parse_bytes(path: &str, bytes: &[u8]) -> Result<AnnSourceFile, Vec<Diagnostic>> {
    parse_source(path, &String::from_utf8_lossy(bytes))
}

pub fn parse_traced(path: &str, source: &str) -> ParseOutcome {
    let (tokens, mut diagnostics) = tokenize_with_errors(path, source);
    let mut p = Parser::new(&tokens, path);
    let file = p.file();
    diagnostics.append(&mut p.diags);
    diagnostics.sort_by_key(|d| d.span.offset);
    ParseOutcome { file: Some(file), diagnostics, coverage: p.coverage }
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    path: String,
    diags: Vec<Diagnostic>,
    coverage: BTreeSet<&'static str>,
}

type PResult<T> = Result<T, ()>;

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], path: &str) -> Self {
        Parser { toks, pos: 0, path: path.to_string(), diags: Vec::new(), coverage: BTreeSet::new() }
    }

    fn peek(&self) -> &TokenKind {
        self.toks.get(self.pos).map(|t| &t.kind).unwrap_or(&TokenKind::Eof)
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        self.toks.get(self.pos + n).map(|t| &t.kind).unwrap_or(&TokenKind::Eof)
    }

    fn span(&self) -> Span {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => t.span,
            None => Span::new(0, 0, 1, 1),
        }
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            return self.span();
        }
        self.toks[self.pos - 1].span
    }

    fn bump(&mut self) -> TokenKind {
        let k = self.peek().clone();
        if self.pos < self.toks.len() && k != TokenKind::Eof {
            self.pos += 1;
        }
        k
    }

    fn is_kw(&self, kw: Keyword) -> bool {
        *self.peek() == TokenKind::Kw(kw)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Kw(kw))
    }

    fn hit(&mut self, production: &'static str) {
        self.coverage.insert(production);
    }

    fn error(&mut self, code: &'static str, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, &self.path, span, msg));
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let span = self.span();
        let found = self.peek().to_string();
        self.error("syntax", span, format!("expected {expected}, found {found}"));
        Err(())
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            self.unexpected(what)
        }
    }

    /// Identifier; keywords are accepted as names where no ambiguity arises.
    fn name(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            TokenKind::Ident(s) => {
                self.bump();
                Ok(s)
            }
            TokenKind::Kw(k) => {
                self.bump();
                Ok(k.as_str().to_string())
            }
            _ => self.unexpected(what),
        }
    }

    fn at_annotation_start(&self) -> bool {
        match self.peek() {
            TokenKind::Kw(Keyword::Annotation) => true,
            TokenKind::Kw(Keyword::Runtime | Keyword::Class | Keyword::Source) => {
                *self.peek_at(1) == TokenKind::Kw(Keyword::Annotation)
            }
            _ => false,
        }
    }

    fn file(&mut self) -> AnnSourceFile {
        let mut package = None;
        if self.is_kw(Keyword::Package) {
            self.bump();
            match self.dotted_name() {
                Ok(name) => {
                    package = Some(name);
                    if self.expect(TokenKind::Semi, "`;` after package name").is_err() {
                        self.skip_to_annotation();
                    }
                }
                Err(()) => self.skip_to_annotation(),
            }
        }
        let mut annotations = Vec::new();
        while *self.peek() != TokenKind::Eof {
            if self.at_annotation_start() {
                match self.annotation() {
                    Ok(a) => annotations.push(a),
                    Err(()) => self.skip_to_annotation(),
                }
            } else {
                let _ = self.unexpected::<()>("annotation definition");
                self.bump();
                self.skip_to_annotation();
            }
        }
        AnnSourceFile { package, annotations, source_path: self.path.clone() }
    }

    fn skip_to_annotation(&mut self) {
        while *self.peek() != TokenKind::Eof && !self.at_annotation_start() {
            self.bump();
        }
    }

    /// Skips to just past the next `;`, stopping early (without consuming)
    /// at `}` or a new annotation header.
    fn recover_item(&mut self) {
        loop {
            match self.peek() {
                TokenKind::Eof | TokenKind::RBrace => return,
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                _ if self.at_annotation_start() => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn dotted_name(&mut self) -> PResult<String> {
        let mut name = self.name("package name")?;
        while *self.peek() == TokenKind::Dot {
            self.bump();
            name.push('.');
            name.push_str(&self.name("identifier after `.`")?);
        }
        Ok(name)
    }

    fn annotation(&mut self) -> PResult<AnnotationDef> {
        let start = self.span();
        let retention = match self.peek() {
            TokenKind::Kw(Keyword::Runtime) => {
                self.hit("Retention:runtime");
                self.bump();
                Retention::Runtime
            }
            TokenKind::Kw(Keyword::Class) => {
                self.hit("Retention:class");
                self.bump();
                Retention::Class
            }
            TokenKind::Kw(Keyword::Source) => {
                self.hit("Retention:source");
                self.bump();
                Retention::Source
            }
            _ => Retention::Unspecified,
        };
        if !self.eat_kw(Keyword::Annotation) {
            return self.unexpected("`annotation`");
        }
        let name = self.name("annotation name")?;
        let header = start.to(self.prev_span());
        self.expect(TokenKind::LBrace, "`{`")?;
        self.hit("Annotation");

        let mut attributes = Vec::new();
        let mut constraints = Vec::new();
        loop {
            match self.peek() {
                TokenKind::RBrace => {
                    self.bump();
                    break;
                }
                TokenKind::Eof => {
                    let span = self.span();
                    self.error("syntax", span, format!("unclosed body of annotation `{name}`"));
                    break;
                }
                _ if self.at_annotation_start() && !self.is_kw(Keyword::Annotation) => {
                    let span = self.span();
                    self.error("syntax", span, format!("unclosed body of annotation `{name}`"));
                    break;
                }
                TokenKind::Kw(Keyword::Annotation) => {
                    let span = self.span();
                    self.error("syntax", span, format!("unclosed body of annotation `{name}`"));
                    break;
                }
                TokenKind::Kw(Keyword::Require | Keyword::Forbid | Keyword::At) => match self.constraint() {
                    Ok(c) => constraints.push(c),
                    Err(()) => self.recover_item(),
                },
                _ => {
                    let after_constraints = !constraints.is_empty();
                    match self.attribute() {
                        Ok(a) => {
                            if after_constraints {
                                self.error(
                                    "syntax",
                                    a.span,
                                    "attributes must be declared before constraints",
                                );
                            }
                            attributes.push(a);
                        }
                        Err(()) => self.recover_item(),
                    }
                }
            }
        }
        if !constraints.is_empty() {
            self.hit("Constraints");
        }
        Ok(AnnotationDef { name, retention, attributes, constraints, span: header })
    }

    fn attribute(&mut self) -> PResult<AttributeDef> {
        let start = self.span();
        let (kind, production) = match self.peek().clone() {
            TokenKind::Kw(Keyword::ClassType) => (AttrKind::ClassRef, "ClassAtt"),
            TokenKind::Kw(Keyword::StringType) => (AttrKind::String, "StringAtt"),
            TokenKind::Kw(Keyword::Int) => (AttrKind::Int, "IntAtt"),
            TokenKind::Kw(Keyword::Long) => (AttrKind::Long, "LongAtt"),
            TokenKind::Kw(Keyword::Short) => (AttrKind::Short, "ShortAtt"),
            TokenKind::Kw(Keyword::Float) => (AttrKind::Float, "FloatAtt"),
            TokenKind::Kw(Keyword::Double) => (AttrKind::Double, "DoubleAtt"),
            TokenKind::Kw(Keyword::Char) => (AttrKind::Char, "CharAtt"),
            TokenKind::Kw(Keyword::Boolean) => (AttrKind::Boolean, "BooleanAtt"),
            TokenKind::Kw(Keyword::Byte) => (AttrKind::Byte, "ByteAtt"),
            TokenKind::Ident(name) => (AttrKind::External(name), "ExternalAtt"),
            _ => return self.unexpected("attribute type, `require`, `forbid`, `at` or `}`"),
        };
        self.bump();
        let mut is_array = false;
        if *self.peek() == TokenKind::LBracket {
            self.bump();
            self.expect(TokenKind::RBracket, "`]`")?;
            is_array = true;
            self.hit("Attribute:array");
        }
        let name = self.name("attribute name")?;
        let mut default = None;
        if self.eat(&TokenKind::Eq) {
            default = Some(self.value(&kind)?);
        }
        let span = start.to(self.prev_span());
        self.expect(TokenKind::Semi, "`;` after attribute")?;
        self.hit("Attribute");
        self.hit(production);
        Ok(AttributeDef { name, kind, is_array, default, span })
    }

    fn value(&mut self, kind: &AttrKind) -> PResult<DefaultValue> {
        self.hit("AnnValue");
        if *self.peek() == TokenKind::LBrace {
            self.bump();
            let mut items = Vec::new();
            if self.eat(&TokenKind::RBrace) {
                self.hit("AnnArray:empty");
                return Ok(DefaultValue::Array(items));
            }
            loop {
                items.push(self.basic_value(kind)?);
                if self.eat(&TokenKind::Comma) {
                    continue;
                }
                self.expect(TokenKind::RBrace, "`,` or `}` in array")?;
                break;
            }
            self.hit("AnnArray:items");
            return Ok(DefaultValue::Array(items));
        }
        self.basic_value(kind)
    }

    fn basic_value(&mut self, kind: &AttrKind) -> PResult<DefaultValue> {
        let v = match self.peek().clone() {
            TokenKind::AtSign => {
                let v = self.ann_literal()?;
                self.hit("AnnBasicValue:annotation");
                v
            }
            TokenKind::Str(s) => {
                self.bump();
                self.hit("AnnBasicValue:string");
                DefaultValue::Str(s)
            }
            TokenKind::Char(c) => {
                self.bump();
                self.hit("AnnBasicValue:char");
                DefaultValue::Character(c)
            }
            TokenKind::Int(i) => {
                self.bump();
                self.hit(if *kind == AttrKind::Byte { "AnnBasicValue:byte" } else { "AnnBasicValue:int" });
                DefaultValue::Integer(i)
            }
            TokenKind::Real(r) => {
                self.bump();
                self.hit("AnnBasicValue:float");
                DefaultValue::Real(r)
            }
            TokenKind::Bool(b) => {
                self.bump();
                self.hit("AnnBasicValue:boolean");
                DefaultValue::Boolean(b)
            }
            TokenKind::Ident(_) | TokenKind::Kw(_) if *self.peek_at(1) == TokenKind::Dot => {
                let ty = self.name("type name")?;
                self.bump();
                if self.eat_kw(Keyword::Class) {
                    self.hit("ClassDefault");
                    DefaultValue::ClassLiteral(ty)
                } else {
                    let constant = self.name("enum constant or `class` after `.`")?;
                    self.hit("EnumDefault");
                    self.hit("AnnBasicValue:enum");
                    DefaultValue::EnumRef(ty, constant)
                }
            }
            _ => return self.unexpected("default value"),
        };
        Ok(v)
    }

    fn ann_literal(&mut self) -> PResult<DefaultValue> {
        self.expect(TokenKind::AtSign, "`@`")?;
        let name = self.name("annotation name after `@`")?;
        self.hit("AnnID");
        if !self.eat(&TokenKind::LParen) {
            self.hit("AnnDefault:bare");
            return Ok(DefaultValue::AnnLiteral { name, args: AnnArgs::None });
        }
        if self.eat(&TokenKind::RParen) {
            self.hit("AnnDefault:bare");
            return Ok(DefaultValue::AnnLiteral { name, args: AnnArgs::None });
        }
        let is_pairs = matches!(self.peek(), TokenKind::Ident(_) | TokenKind::Kw(_)) && *self.peek_at(1) == TokenKind::Eq;
        let args = if is_pairs {
            let mut pairs: Vec<(String, DefaultValue)> = Vec::new();
            loop {
                let key = self.name("key")?;
                self.expect(TokenKind::Eq, "`=`")?;
                let v = self.value(&AttrKind::External(String::new()))?;
                self.hit("KeyValue");
                pairs.push((key, v));
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.hit("AnnDefault:pairs");
            AnnArgs::Pairs(pairs)
        } else {
            let v = self.value(&AttrKind::External(String::new()))?;
            self.hit("AnnDefault:value");
            AnnArgs::Single(Box::new(v))
        };
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(DefaultValue::AnnLiteral { name, args })
    }

    fn target_type(&mut self) -> Option<TargetType> {
        let (t, p) = match self.peek() {
            TokenKind::Kw(Keyword::Interface) => (TargetType::Interface, "TargetType:interface"),
            TokenKind::Kw(Keyword::Class) => (TargetType::Class, "TargetType:class"),
            TokenKind::Kw(Keyword::Annotation) => (TargetType::Annotation, "TargetType:annotation"),
            TokenKind::Kw(Keyword::Method) => (TargetType::Method, "TargetType:method"),
            TokenKind::Kw(Keyword::Field) => (TargetType::Field, "TargetType:field"),
            TokenKind::Kw(Keyword::Constructor) => (TargetType::Constructor, "TargetType:constructor"),
            TokenKind::Kw(Keyword::Enum) => (TargetType::Enum, "TargetType:enum"),
            _ => return None,
        };
        self.bump();
        self.hit(p);
        Some(t)
    }

    fn constraint(&mut self) -> PResult<ConstraintDef> {
        let start = self.span();
        let mut scope = None;
        if self.eat_kw(Keyword::At) {
            match self.target_type() {
                Some(t) => scope = Some(t),
                None => return self.unexpected("target type after `at`"),
            }
            self.expect(TokenKind::Colon, "`:` after scope")?;
        }
        let kind = if self.eat_kw(Keyword::Require) {
            ConstraintKind::Require
        } else if self.eat_kw(Keyword::Forbid) {
            ConstraintKind::Forbid
        } else {
            return self.unexpected("`require` or `forbid`");
        };
        let mut all = false;
        if kind == ConstraintKind::Require && self.is_kw(Keyword::All) {
            let span = self.span();
            self.bump();
            if scope.is_none() {
                self.error("syntax", span, "`all` is only allowed in `at T: require all ...` constraints");
            }
            all = true;
            self.hit("Require:all");
        }
        let (joiner, other) = match kind {
            ConstraintKind::Require => (Keyword::Or, Keyword::And),
            ConstraintKind::Forbid => (Keyword::And, Keyword::Or),
        };
        let mut statements = vec![self.statement()?];
        loop {
            if self.eat_kw(joiner) {
                statements.push(self.statement()?);
            } else if self.is_kw(other) {
                let span = self.span();
                self.error(
                    "syntax",
                    span,
                    format!("`{}` statements are joined with `{}`", kind.keyword(), joiner.as_str()),
                );
                self.bump();
                statements.push(self.statement()?);
            } else {
                break;
            }
        }
        let span = start.to(self.prev_span());
        self.expect(TokenKind::Semi, "`;` after constraint")?;
        self.hit(match (kind, scope.is_some()) {
            (ConstraintKind::Require, false) => "Require",
            (ConstraintKind::Require, true) => "Require:at",
            (ConstraintKind::Forbid, false) => "Forbid",
            (ConstraintKind::Forbid, true) => "Forbid:at",
        });
        Ok(ConstraintDef { kind, scope, all, statements, span })
    }

    fn statement(&mut self) -> PResult<Statement> {
        let start = self.span();
        let mut ann_ref = None;
        if self.eat(&TokenKind::AtSign) {
            ann_ref = Some(self.name("annotation name after `@`")?);
            self.hit("AnnID");
        }
        let mut mods = Modifiers::default();
        let mut any_mod = false;
        loop {
            let span = self.span();
            let (dup, production) = match self.peek() {
                TokenKind::Kw(k @ (Keyword::Public | Keyword::Private | Keyword::Protected | Keyword::Package)) => {
                    let v = match k {
                        Keyword::Public => Visibility::Public,
                        Keyword::Private => Visibility::Private,
                        Keyword::Protected => Visibility::Protected,
                        _ => Visibility::Package,
                    };
                    let dup = mods.visibility.is_some();
                    mods.visibility = Some(v);
                    let p = match v {
                        Visibility::Public => "VisibMod:public",
                        Visibility::Private => "VisibMod:private",
                        Visibility::Protected => "VisibMod:protected",
                        Visibility::Package => "VisibMod:package",
                    };
                    (dup, p)
                }
                TokenKind::Kw(Keyword::Final) => (std::mem::replace(&mut mods.is_final, true), "Modifiers:final"),
                TokenKind::Kw(Keyword::Abstract) => {
                    (std::mem::replace(&mut mods.is_abstract, true), "Modifiers:abstract")
                }
                TokenKind::Kw(Keyword::Static) => (std::mem::replace(&mut mods.is_static, true), "Modifiers:static"),
                _ => break,
            };
            self.bump();
            any_mod = true;
            self.hit(production);
            if dup {
                self.error("syntax", span, "modifier category repeated in one statement");
            }
        }
        if any_mod {
            self.hit("Modifiers");
        }
        let target = self.target_type();
        if target.is_none() && (ann_ref.is_none() || any_mod) {
            return self.unexpected("target type (class, interface, annotation, enum, method, field, constructor)");
        }
        if target.is_some() {
            self.hit("Statement:TgtStatement");
            if ann_ref.is_some() {
                self.hit("TgtStatement:AnnID");
            }
        } else {
            self.hit("Statement:AnnID");
        }
        Ok(Statement { ann_ref, modifiers: mods, target, span: start.to(self.prev_span()) })
    }
}
