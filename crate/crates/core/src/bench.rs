//! Synthetic scaling suite: chained annotation sets with a satisfiable
//! variant and an unsatisfiable twin that differs in one constraint.

use std::fmt::Write;
use std::time::Instant;

use serde::Serialize;

use crate::compiler::{compile, ConstraintIR};
use crate::finder::{find, FinderResult, Scope};
use crate::syntax::parse_source;

pub const CONSTRAINT_COUNTS: [usize; 3] = [2, 4, 8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Twin {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
}

impl Twin {
    pub fn label(self) -> &'static str {
        match self {
            Twin::Sat => "SAT",
            Twin::Unsat => "UNSAT",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchCase {
    pub twin: Twin,
    pub anns: usize,
    /// Constraints per annotation.
    pub constraints: usize,
    pub source: String,
}

/// Set sizes 2, 4, 8, ... up to `max_anns`.
pub fn sizes(max_anns: usize) -> Vec<usize> {
    std::iter::successors(Some(2usize), |n| n.checked_mul(2)).take_while(|&n| n <= max_anns).collect()
}

fn requires(i: usize, n: usize, twin: Twin) -> [String; 4] {
    let chain = if twin == Twin::Unsat && i == 1 {
        "require @A0 public class;".to_string()
    } else if i + 1 < n {
        format!("require @A{} class;", i + 1)
    } else {
        "require class;".to_string()
    };
    [
        chain,
        "at class: require public constructor or protected constructor;".to_string(),
        "at class: require private field;".to_string(),
        "at class: require method;".to_string(),
    ]
}

const FORBIDS: [&str; 4] = [
    "forbid public class;",
    "at class: forbid final method;",
    "at class: forbid public field;",
    "at class: forbid static final field;",
];

/// Ann source for one case. Every annotation must share a class with the
/// next one; the twin makes `A1` demand a public class, which `A0` forbids.
pub fn case_source(anns: usize, constraints: usize, twin: Twin) -> String {
    let half = constraints / 2;
    let mut s = String::new();
    for i in 0..anns {
        let _ = writeln!(s, "annotation A{i} {{");
        for r in requires(i, anns, twin).iter().take(half) {
            let _ = writeln!(s, "    {r}");
        }
        for f in FORBIDS.iter().take(half) {
            let _ = writeln!(s, "    {f}");
        }
        s.push_str("}\n");
    }
    s
}

pub fn suite(max_anns: usize) -> Vec<BenchCase> {
    let mut out = Vec::new();
    for n in sizes(max_anns) {
        for c in CONSTRAINT_COUNTS {
            for twin in [Twin::Sat, Twin::Unsat] {
                out.push(BenchCase { twin, anns: n, constraints: c, source: case_source(n, c, twin) });
            }
        }
    }
    out
}

impl BenchCase {
    pub fn compile(&self) -> ConstraintIR {
        let file = parse_source("bench.ann", &self.source).expect("generated sources parse");
        compile(&[file]).expect("generated sources compile").ir
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub set: Twin,
    pub anns: usize,
    pub constraints: usize,
    pub verdict: &'static str,
    /// Wall-clock milliseconds, microsecond resolution.
    pub ms: f64,
    pub candidates: u64,
}

pub fn run(case: &BenchCase, scope: &Scope) -> (BenchRow, FinderResult) {
    let ir = case.compile();
    let start = Instant::now();
    let r = find(&ir, scope, &[]);
    let ms = (start.elapsed().as_micros() as f64) / 1000.0;
    let row = BenchRow {
        set: case.twin,
        anns: case.anns,
        constraints: case.constraints,
        verdict: r.verdict(),
        ms,
        candidates: r.stats().candidates,
    };
    (row, r)
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}
