use std::fmt;

use crate::diag::{Diagnostic, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Package,
    Annotation,
    Require,
    Forbid,
    At,
    All,
    And,
    Or,
    Runtime,
    Class,
    Source,
    Interface,
    Method,
    Field,
    Constructor,
    Enum,
    Public,
    Private,
    Protected,
    Final,
    Abstract,
    Static,
    /// `Class`, the attribute type.
    ClassType,
    StringType,
    Int,
    Long,
    Short,
    Float,
    Double,
    Char,
    Boolean,
    Byte,
}

impl Keyword {
    pub fn from_word(word: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match word {
            "package" => Package,
            "annotation" => Annotation,
            "require" => Require,
            "forbid" => Forbid,
            "at" => At,
            "all" => All,
            "and" => And,
            "or" => Or,
            "runtime" => Runtime,
            "class" => Class,
            "source" => Source,
            "interface" => Interface,
            "method" => Method,
            "field" => Field,
            "constructor" => Constructor,
            "enum" => Enum,
            "public" => Public,
            "private" => Private,
            "protected" => Protected,
            "final" => Final,
            "abstract" => Abstract,
            "static" => Static,
            "Class" => ClassType,
            "String" => StringType,
            "int" => Int,
            "long" => Long,
            "short" => Short,
            "float" => Float,
            "double" => Double,
            "char" => Char,
            "boolean" => Boolean,
            "byte" => Byte,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Package => "package",
            Annotation => "annotation",
            Require => "require",
            Forbid => "forbid",
            At => "at",
            All => "all",
            And => "and",
            Or => "or",
            Runtime => "runtime",
            Class => "class",
            Source => "source",
            Interface => "interface",
            Method => "method",
            Field => "field",
            Constructor => "constructor",
            Enum => "enum",
            Public => "public",
            Private => "private",
            Protected => "protected",
            Final => "final",
            Abstract => "abstract",
            Static => "static",
            ClassType => "Class",
            StringType => "String",
            Int => "int",
            Long => "long",
            Short => "short",
            Float => "float",
            Double => "double",
            Char => "char",
            Boolean => "boolean",
            Byte => "byte",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Kw(Keyword),
    Str(String),
    Char(char),
    Int(i64),
    /// Decimal literal, kept as written so code generation can reproduce it.
    Real(String),
    Bool(bool),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Comma,
    Eq,
    AtSign,
    Dot,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Kw(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Str(_) => f.write_str("string literal"),
            TokenKind::Char(_) => f.write_str("character literal"),
            TokenKind::Int(_) => f.write_str("integer literal"),
            TokenKind::Real(_) => f.write_str("decimal literal"),
            TokenKind::Bool(b) => write!(f, "`{b}`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::LBracket => f.write_str("`[`"),
            TokenKind::RBracket => f.write_str("`]`"),
            TokenKind::Semi => f.write_str("`;`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Eq => f.write_str("`=`"),
            TokenKind::AtSign => f.write_str("`@`"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::Eof => f.write_str("end of file"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Lexer<'a> {
    src: &'a str,
    file: &'a str,
    pos: usize,
    line: u32,
    column: u32,
    tokens: Vec<Token>,
    errors: Vec<Diagnostic>,
}

/// Splits `source` into tokens, collecting every lexical error. The token
/// stream always ends with `Eof`.
pub fn tokenize_with_errors(file: &str, source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lx = Lexer { src: source, file, pos: 0, line: 1, column: 1, tokens: Vec::new(), errors: Vec::new() };
    lx.run();
    (lx.tokens, lx.errors)
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let (tokens, errors) = tokenize_with_errors("<input>", source);
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: usize, line: u32, column: u32) -> Span {
        Span::new(start, self.pos - start, line, column)
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: u32, column: u32) {
        let span = self.span_from(start, line, column);
        self.tokens.push(Token { kind, span });
    }

    fn error(&mut self, code: &'static str, span: Span, msg: impl Into<String>) {
        self.errors.push(Diagnostic::error(code, self.file, span, msg));
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let (start, line, column) = (self.pos, self.line, self.column);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '/' && self.peek2() == Some('/') {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' || c == '$' {
                self.word(start, line, column);
                continue;
            }
            if c.is_ascii_digit() || (c == '-' && self.peek2().is_some_and(|d| d.is_ascii_digit())) {
                self.number(start, line, column);
                continue;
            }
            if c == '"' {
                self.string(start, line, column);
                continue;
            }
            if c == '\'' {
                self.char_lit(start, line, column);
                continue;
            }
            self.bump();
            let kind = match c {
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '[' => TokenKind::LBracket,
                ']' => TokenKind::RBracket,
                ';' => TokenKind::Semi,
                ':' => TokenKind::Colon,
                ',' => TokenKind::Comma,
                '=' => TokenKind::Eq,
                '@' => TokenKind::AtSign,
                '.' => TokenKind::Dot,
                other => {
                    let span = self.span_from(start, line, column);
                    self.error("illegal-char", span, format!("illegal character {other:?}"));
                    continue;
                }
            };
            self.push(kind, start, line, column);
        }
        let (pos, line, column) = (self.pos, self.line, self.column);
        self.tokens.push(Token { kind: TokenKind::Eof, span: Span::new(pos, 0, line, column) });
    }

    fn word(&mut self, start: usize, line: u32, column: u32) {
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
                self.bump();
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        let kind = match text {
            "true" => TokenKind::Bool(true),
            "false" => TokenKind::Bool(false),
            _ => match Keyword::from_word(text) {
                Some(k) => TokenKind::Kw(k),
                None => TokenKind::Ident(text.to_string()),
            },
        };
        self.push(kind, start, line, column);
    }

    fn digits(&mut self, radix: u32) {
        while let Some(c) = self.peek() {
            if c.is_digit(radix) || c == '_' {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn number(&mut self, start: usize, line: u32, column: u32) {
        let negative = self.peek() == Some('-');
        if negative {
            self.bump();
        }
        let body_start = self.pos;
        if self.peek() == Some('0') && matches!(self.peek2(), Some('x') | Some('X')) {
            self.bump();
            self.bump();
            let hex_start = self.pos;
            self.digits(16);
            let digits: String = self.src[hex_start..self.pos].chars().filter(|c| *c != '_').collect();
            let span = self.span_from(start, line, column);
            match i64::from_str_radix(&digits, 16) {
                Ok(v) => self.push(TokenKind::Int(if negative { -v } else { v }), start, line, column),
                Err(_) => self.error("bad-number", span, "malformed or out-of-range hexadecimal literal"),
            }
            return;
        }
        self.digits(10);
        let mut real = false;
        if self.peek() == Some('.') && self.peek2().is_some_and(|d| d.is_ascii_digit()) {
            real = true;
            self.bump();
            self.digits(10);
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let save = (self.pos, self.line, self.column);
            self.bump();
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.bump();
            }
            if self.peek().is_some_and(|d| d.is_ascii_digit()) {
                real = true;
                self.digits(10);
            } else {
                (self.pos, self.line, self.column) = save;
            }
        }
        if real && matches!(self.peek(), Some('f' | 'F' | 'd' | 'D')) {
            self.bump();
        }
        let text = &self.src[start..self.pos];
        let span = self.span_from(start, line, column);
        if real {
            let numeric: String =
                text.chars().filter(|c| *c != '_' && !matches!(c, 'f' | 'F' | 'd' | 'D')).collect();
            if numeric.parse::<f64>().is_ok_and(f64::is_finite) {
                self.push(TokenKind::Real(text.to_string()), start, line, column);
            } else {
                self.error("bad-number", span, format!("decimal literal `{text}` is out of range"));
            }
        } else {
            let digits: String = self.src[body_start..self.pos].chars().filter(|c| *c != '_').collect();
            let parsed = if negative { format!("-{digits}") } else { digits }.parse::<i64>();
            match parsed {
                Ok(v) => self.push(TokenKind::Int(v), start, line, column),
                Err(_) => self.error("bad-number", span, format!("integer literal `{text}` does not fit in 64 bits")),
            }
        }
    }

    /// Reads one (possibly escaped) character inside a quoted literal.
    /// Returns `None` at end of line or input.
    fn quoted_char(&mut self) -> Option<Result<char, String>> {
        let c = self.peek()?;
        if c == '\n' {
            return None;
        }
        self.bump();
        if c != '\\' {
            return Some(Ok(c));
        }
        let e = match self.peek() {
            None | Some('\n') => return None,
            Some(e) => e,
        };
        self.bump();
        Some(match e {
            'n' => Ok('\n'),
            't' => Ok('\t'),
            'r' => Ok('\r'),
            'b' => Ok('\u{8}'),
            'f' => Ok('\u{c}'),
            '0' => Ok('\0'),
            '\\' => Ok('\\'),
            '\'' => Ok('\''),
            '"' => Ok('"'),
            'u' => {
                let mut hex = String::new();
                for _ in 0..4 {
                    match self.peek() {
                        Some(h) if h.is_ascii_hexdigit() => {
                            hex.push(h);
                            self.bump();
                        }
                        _ => break,
                    }
                }
                u32::from_str_radix(&hex, 16)
                    .ok()
                    .filter(|_| hex.len() == 4)
                    .and_then(char::from_u32)
                    .ok_or_else(|| format!("invalid unicode escape `\\u{hex}`"))
            }
            other => Err(format!("unknown escape `\\{other}`")),
        })
    }

    fn string(&mut self, start: usize, line: u32, column: u32) {
        self.bump();
        let mut value = String::new();
        let mut bad = None;
        loop {
            if self.peek() == Some('"') {
                self.bump();
                break;
            }
            match self.quoted_char() {
                None => {
                    let span = self.span_from(start, line, column);
                    self.error("unterminated-string", span, "unterminated string literal");
                    return;
                }
                Some(Ok(c)) => value.push(c),
                Some(Err(e)) => bad = Some(e),
            }
        }
        match bad {
            Some(e) => {
                let span = self.span_from(start, line, column);
                self.error("bad-escape", span, e);
            }
            None => self.push(TokenKind::Str(value), start, line, column),
        }
    }

    fn char_lit(&mut self, start: usize, line: u32, column: u32) {
        self.bump();
        let empty = self.peek() == Some('\'');
        let c = match self.quoted_char() {
            Some(Ok(c)) if !empty => c,
            Some(Err(e)) => {
                self.skip_to_quote();
                let span = self.span_from(start, line, column);
                self.error("bad-escape", span, e);
                return;
            }
            _ => {
                let span = self.span_from(start, line, column);
                self.error("unterminated-char", span, "unterminated or empty character literal");
                return;
            }
        };
        if self.peek() == Some('\'') {
            self.bump();
            self.push(TokenKind::Char(c), start, line, column);
        } else {
            self.skip_to_quote();
            let span = self.span_from(start, line, column);
            self.error("unterminated-char", span, "character literal must contain exactly one character");
        }
    }

    fn skip_to_quote(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                return;
            }
            self.bump();
            if c == '\'' {
                return;
            }
        }
    }
}
