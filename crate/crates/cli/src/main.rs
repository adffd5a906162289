use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use annlint::bench;
use annlint::checker::check_json;
use annlint::codegen::generate;
use annlint::compiler::{compile, emit_ocl, Compiled};
use annlint::diag::Diagnostic;
use annlint::finder::{explain_scope, find, Demand, FinderResult, Scope};
use annlint::serializer::to_java_text;
use annlint::syntax::{ast::AnnSourceFile, load_set};

const EX_OK: u8 = 0;
const EX_FAIL: u8 = 1;
const EX_UNSAT: u8 = 2;
const EX_TIMEOUT: u8 = 3;
const EX_USAGE: u8 = 64;
const EX_IOERR: u8 = 74;

/// Design-time checking for Java annotation sets written in Ann.
#[derive(Parser)]
#[command(name = "annlint", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and analyze Ann files.
    Parse {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Search for a program model that satisfies the annotation set.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        scope: ScopeArgs,
        /// Print the witness as Java text and write it as JSON.
        #[arg(long)]
        example: bool,
        /// Where `--example` writes the witness model.
        #[arg(long, default_value = "witness.json")]
        witness: PathBuf,
        /// Require some element carrying all of these annotations (comma separated).
        #[arg(long, value_name = "ANNS")]
        demand: Vec<String>,
    },
    /// Check annotation placement in a program model.
    Check {
        #[arg(long, value_name = "MODEL_JSON")]
        model: PathBuf,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Also print the diagnostics as JSON on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Generate Java annotation types and processors.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Emit the constraints as USE/OCL text.
    Ocl {
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run the synthetic SAT/UNSAT scaling suite and print CSV.
    Bench {
        #[arg(long, default_value_t = 16)]
        max_anns: usize,
        #[arg(long)]
        deadline_ms: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScopeArgs {
    /// `key = value` scope file.
    #[arg(long, value_name = "FILE")]
    scope: Option<PathBuf>,
    #[arg(long)]
    ann_min: Option<u32>,
    #[arg(long)]
    ann_max: Option<u32>,
    #[arg(long)]
    max_classifiers: Option<usize>,
    #[arg(long)]
    max_methods: Option<usize>,
    #[arg(long)]
    max_fields: Option<usize>,
    #[arg(long)]
    deadline_ms: Option<u64>,
    #[arg(long)]
    allow_enums: bool,
    #[arg(long)]
    no_interfaces: bool,
    /// Generate extends/implements edges.
    #[arg(long)]
    inheritance: bool,
    /// Exempt an annotation from the minimum-use obligation.
    #[arg(long, value_name = "ANN")]
    relax: Vec<String>,
    /// Plain chronological search without learning or symmetry breaking.
    #[arg(long)]
    no_pruning: bool,
}

enum Failure {
    Usage(String),
    Io(String),
    /// Diagnostics were already printed.
    Reported,
}

type Outcome = Result<u8, Failure>;

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

struct Term {
    color: bool,
}

impl Term {
    fn new() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Term { color: !no_color && io::stderr().is_terminal() }
    }

    fn paint(&self, line: &str) -> String {
        if !self.color {
            return line.to_string();
        }
        for (word, code) in [("error[", "31"), ("warning[", "33"), ("note[", "36")] {
            if let Some(i) = line.find(word) {
                let end = i + word.len() - 1;
                return format!("{}\x1b[1;{code}m{}\x1b[0m{}", &line[..i], &line[i..end], &line[end..]);
            }
        }
        line.to_string()
    }

    fn diag(&self, d: &impl std::fmt::Display) {
        eprintln!("{}", self.paint(&d.to_string()));
    }
}

fn read_sources(files: &[PathBuf]) -> Result<Vec<(String, String)>, Failure> {
    files
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(|e| io_err(p, e))?;
            Ok((p.display().to_string(), String::from_utf8_lossy(&bytes).into_owned()))
        })
        .collect()
}

fn load(term: &Term, files: &[PathBuf]) -> Result<(Vec<AnnSourceFile>, Vec<Diagnostic>), Failure> {
    let sources = read_sources(files)?;
    match load_set(sources.iter().map(|(p, s)| (p.as_str(), s.as_str()))) {
        Ok(r) => Ok(r),
        Err(diags) => {
            diags.iter().for_each(|d| term.diag(d));
            Err(Failure::Reported)
        }
    }
}

fn load_compiled(term: &Term, files: &[PathBuf]) -> Result<(Vec<AnnSourceFile>, Compiled), Failure> {
    let (parsed, _) = load(term, files)?;
    match compile(&parsed) {
        Ok(c) => {
            c.warnings.iter().for_each(|d| term.diag(d));
            Ok((parsed, c))
        }
        Err(diags) => {
            diags.iter().for_each(|d| term.diag(d));
            Err(Failure::Reported)
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn print_stdout(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn build_scope(a: &ScopeArgs) -> Result<Scope, Failure> {
    let mut s = Scope::default();
    if let Some(p) = &a.scope {
        let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
        s.apply_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    macro_rules! set {
        ($($k:ident),*) => { $(if let Some(v) = a.$k { s.$k = v; })* };
    }
    set!(ann_min, ann_max, max_classifiers, max_methods, max_fields);
    if a.deadline_ms.is_some() {
        s.deadline_ms = a.deadline_ms;
    }
    s.allow_enums |= a.allow_enums;
    s.allow_interfaces &= !a.no_interfaces;
    s.inheritance |= a.inheritance;
    s.pruning &= !a.no_pruning;
    s.relaxed.extend(a.relax.iter().cloned());
    s.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(s)
}

fn cmd_parse(term: &Term, files: &[PathBuf]) -> Outcome {
    let (parsed, warnings) = load(term, files)?;
    warnings.iter().for_each(|d| term.diag(d));
    let n: usize = parsed.iter().map(|f| f.annotations.len()).sum();
    eprintln!("ok: {n} annotation(s) in {} file(s)", parsed.len());
    Ok(EX_OK)
}

fn cmd_validate(term: &Term, files: &[PathBuf], scope: &ScopeArgs, example: bool, witness: &Path, demand: &[String]) -> Outcome {
    let scope = build_scope(scope)?;
    let (_, compiled) = load_compiled(term, files)?;
    let extra: Vec<Demand> = demand
        .iter()
        .map(|d| Demand { anns: d.split(',').map(|s| s.trim().trim_start_matches('@').to_string()).collect(), ..Default::default() })
        .collect();
    for d in &extra {
        if let Some(a) = d.anns.iter().find(|a| !compiled.ir.knows(a)) {
            return Err(Failure::Usage(format!("--demand names unknown annotation @{a}")));
        }
    }
    let result = find(&compiled.ir, &scope, &extra);
    eprintln!("{}", explain_scope(&result, &scope));
    match &result {
        FinderResult::Sat { witness: w, .. } => {
            if example {
                print_stdout(&to_java_text(w))?;
                write_file(witness, &w.to_json())?;
                eprintln!("witness written to {}", witness.display());
            }
            Ok(EX_OK)
        }
        FinderResult::UnsatWithinScope { .. } => Ok(EX_UNSAT),
        FinderResult::Timeout { .. } => Ok(EX_TIMEOUT),
    }
}

fn cmd_check(term: &Term, model: &Path, files: &[PathBuf], json: bool) -> Outcome {
    let text = fs::read_to_string(model).map_err(|e| io_err(model, e))?;
    let (_, compiled) = load_compiled(term, files)?;
    let report = check_json(&text, &compiled.ir);
    report.diagnostics.iter().for_each(|d| term.diag(d));
    report.notes.iter().for_each(|d| term.diag(d));
    if json {
        let all: Vec<_> = report.diagnostics.iter().chain(&report.notes).collect();
        let mut s = serde_json::to_string_pretty(&all).expect("diagnostics serialize");
        s.push('\n');
        print_stdout(&s)?;
    }
    let n = report.error_count();
    eprintln!("{n} error(s)");
    Ok(if n == 0 { EX_OK } else { EX_FAIL })
}

fn cmd_gen(term: &Term, out: &Path, files: &[PathBuf]) -> Outcome {
    let (parsed, compiled) = load_compiled(term, files)?;
    let units = match generate(&parsed, &compiled.ir) {
        Ok(u) => u,
        Err(e) => {
            eprintln!("{}", term.paint(&format!("error[codegen]: {e}")));
            return Ok(EX_FAIL);
        }
    };
    for u in &units {
        write_file(&out.join(&u.relative_path), &u.contents)?;
    }
    eprintln!("wrote {} file(s) under {}", units.len(), out.display());
    Ok(EX_OK)
}

fn cmd_ocl(term: &Term, out: Option<&Path>, files: &[PathBuf]) -> Outcome {
    let (_, compiled) = load_compiled(term, files)?;
    let text = emit_ocl(&compiled.ir);
    match out {
        Some(p) => {
            write_file(p, &text)?;
            eprintln!("wrote {}", p.display());
        }
        None => print_stdout(&text)?,
    }
    Ok(EX_OK)
}

fn cmd_bench(max_anns: usize, deadline_ms: Option<u64>, out: Option<&Path>) -> Outcome {
    if max_anns < 2 {
        return Err(Failure::Usage("--max-anns must be at least 2".to_string()));
    }
    let scope = Scope { deadline_ms, ..Scope::default() };
    let mut rows = Vec::new();
    let mut wrong = 0;
    for case in bench::suite(max_anns) {
        let (row, _) = bench::run(&case, &scope);
        eprintln!("{:>5} anns={:<3} constraints={} -> {} in {:.3} ms", row.set.label(), row.anns, row.constraints, row.verdict, row.ms);
        if row.verdict != row.set.label() {
            wrong += 1;
        }
        rows.push(row);
    }
    let faster = rows.chunks(2).filter(|p| p.len() == 2 && p[1].ms <= p[0].ms).count();
    eprintln!("UNSAT twin no slower than its SAT twin in {faster} of {} pairs", rows.len() / 2);
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
    let text = String::from_utf8(buf).expect("csv output is UTF-8");
    match out {
        Some(p) => write_file(p, &text)?,
        None => print_stdout(&text)?,
    }
    if wrong > 0 {
        eprintln!("{wrong} case(s) with an unexpected verdict");
        return Ok(EX_FAIL);
    }
    Ok(EX_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EX_USAGE } else { EX_OK });
        }
    };
    let term = Term::new();
    let outcome = match &cli.cmd {
        Cmd::Parse { files } => cmd_parse(&term, files),
        Cmd::Validate { files, scope, example, witness, demand } => {
            cmd_validate(&term, files, scope, *example, witness, demand)
        }
        Cmd::Check { model, files, json } => cmd_check(&term, model, files, *json),
        Cmd::Gen { out, files } => cmd_gen(&term, out, files),
        Cmd::Ocl { out, files } => cmd_ocl(&term, out.as_deref(), files),
        Cmd::Bench { max_anns, deadline_ms, out } => cmd_bench(*max_anns, *deadline_ms, out.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("annlint: {msg}");
            ExitCode::from(EX_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("annlint: {msg}");
            ExitCode::from(EX_IOERR)
        }
        Err(Failure::Reported) => ExitCode::from(EX_FAIL),
    }
}
