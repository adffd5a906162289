//! Front end for `.ann` files: lexing, parsing, semantic checks and
//! pretty-printing.

pub mod analyze;
pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

use std::collections::BTreeSet;

pub use analyze::analyze;
pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_bytes, parse_source, parse_traced, PRODUCTIONS};
pub use pretty::pretty_print;

use crate::diag::Diagnostic;

/// Grammar productions exercised by a corpus of sources, and those missed.
#[derive(Debug, Clone, Default)]
pub struct CoverageReport {
    pub covered: BTreeSet<&'static str>,
    pub missing: Vec<&'static str>,
}

impl CoverageReport {
    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }
}

pub fn coverage<'a>(corpus: impl IntoIterator<Item = (&'a str, &'a str)>) -> CoverageReport {
    let mut covered = BTreeSet::new();
    for (path, src) in corpus {
        covered.extend(parse_traced(path, src).coverage);
    }
    let missing = PRODUCTIONS.iter().copied().filter(|p| !covered.contains(p)).collect();
    CoverageReport { covered, missing }
}

/// Parses and analyzes a set of sources as one compilation unit. Returns
/// the files and all diagnostics (warnings included).
pub fn load_set<'a>(
    sources: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<(Vec<AnnSourceFile>, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut files = Vec::new();
    let mut errors = Vec::new();
    for (path, src) in sources {
        match parse_source(path, src) {
            Ok(f) => files.push(f),
            Err(mut d) => errors.append(&mut d),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let diags = analyze(&files);
    if crate::diag::has_errors(&diags) {
        return Err(diags);
    }
    Ok((files, diags))
}
