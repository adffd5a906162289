//! Toolchain for the Ann annotation-design language: parsing, constraint
//! compilation, bounded model finding, placement checking and Java code
//! generation.

pub mod diag;
pub mod model;
pub mod syntax;
pub mod compiler;
pub mod finder;
pub mod checker;
pub mod serializer;
pub mod codegen;
pub mod bench;
