//! Java source generation: annotation types and their processors.

mod processors;
mod types;

use thiserror::Error;

use crate::compiler::ConstraintIR;
use crate::syntax::ast::AnnSourceFile;

pub use processors::gen_processors;
pub use types::gen_annotation_type;

pub const DEFAULT_PACKAGE: &str = "annotations";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedUnit {
    /// Slash-separated path below the output root.
    pub relative_path: String,
    pub contents: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CodegenError {
    #[error("@{annotation}.{attribute}: cannot resolve type `{ty}`")]
    UnresolvedType { annotation: String, attribute: String, ty: String },
}

pub(crate) fn unit_path(package: &str, class: &str) -> String {
    format!("{}/{class}.java", package.replace('.', "/"))
}

/// Every annotation type and processor for a compiled file set, in
/// declaration order.
pub fn generate(files: &[AnnSourceFile], ir: &ConstraintIR) -> Result<Vec<GeneratedUnit>, CodegenError> {
    let known: Vec<String> = ir.annotations.iter().map(|a| a.name.clone()).collect();
    let mut out = Vec::new();
    for f in files {
        let package = f.package.as_deref().unwrap_or(DEFAULT_PACKAGE);
        for def in &f.annotations {
            out.push(gen_annotation_type(def, package, &known)?);
            out.extend(gen_processors(def, ir, package));
        }
    }
    Ok(out)
}

/// Non-blank line count, the size measure used for generated code.
pub fn non_blank_lines(text: &str) -> usize {
    text.lines().filter(|l| !l.trim().is_empty()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile;
    use crate::syntax::parse_source;

    fn units(src: &str) -> Vec<GeneratedUnit> {
        let f = parse_source("t.ann", src).unwrap();
        let ir = compile(std::slice::from_ref(&f)).unwrap().ir;
        generate(&[f], &ir).unwrap()
    }

    #[test]
    fn processor_partition() {
        let u = units("annotation A { require class; } annotation B { } annotation C { forbid final class; }");
        let paths: Vec<_> = u.iter().map(|u| u.relative_path.as_str()).collect();
        assert_eq!(
            paths,
            vec![
                "annotations/A.java",
                "annotations/ARequireProcessor.java",
                "annotations/B.java",
                "annotations/C.java",
                "annotations/CForbidProcessor.java"
            ]
        );
        assert!(u.iter().all(|u| u.contents.ends_with('\n')));
    }

    #[test]
    fn braces_balance() {
        let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/grammar_tour.ann")).unwrap();
        for u in units(&src) {
            let open = u.contents.matches('{').count();
            let close = u.contents.matches('}').count();
            assert_eq!(open, close, "{}", u.relative_path);
        }
    }
}
