use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;

use crate::eval::{erase_program, Evaluator, Value};
use crate::logic::{translate_vc, SmtScript};
use crate::solver::{brute_force, solve_all, SolverConfig, UnknownReason, Verdict};
use crate::span::{LineIndex, Span};
use crate::surface::{expand_aliases, parse, SurfaceProgram};
use crate::typesys::{check_program, VerificationCondition};

use super::args::{CheckArgs, Cli, Command};
use super::diagnostic::Diagnostic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

/// Verdict and error tallies for one file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FileReport {
    pub path: PathBuf,
    pub vcs: usize,
    pub valid: usize,
    pub invalid: usize,
    pub unknown: usize,
    /// Syntax and type errors.
    pub errors: usize,
    /// I/O and other failures outside the checked program.
    pub infrastructure: usize,
}

impl FileReport {
    fn new(path: &Path) -> Self {
        FileReport {
            path: path.to_path_buf(),
            ..Default::default()
        }
    }

    fn record(&mut self, v: &Verdict) {
        self.vcs += 1;
        match v {
            Verdict::Valid { .. } => self.valid += 1,
            Verdict::Invalid(_) => self.invalid += 1,
            Verdict::Unknown(_) => self.unknown += 1,
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} VCs, {} valid, {} invalid, {} unknown",
            self.path.display(),
            self.vcs,
            self.valid,
            self.invalid,
            self.unknown
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunReport {
    pub files: Vec<FileReport>,
    pub wall_ms: u128,
    pub solver: String,
}

impl RunReport {
    /// 1 on any invalid VC or program error, else 2 on any unknown verdict or
    /// infrastructure failure, else 0.
    pub fn exit_code(&self) -> i32 {
        let sum = |f: fn(&FileReport) -> usize| self.files.iter().map(f).sum::<usize>();
        if sum(|f| f.invalid) + sum(|f| f.errors) > 0 {
            EXIT_INVALID
        } else if sum(|f| f.unknown) + sum(|f| f.infrastructure) > 0 {
            EXIT_UNKNOWN
        } else {
            EXIT_OK
        }
    }
}

/// Exit code for a multiset of verdicts alone.
pub fn exit_code_for(verdicts: &[Verdict]) -> i32 {
    if verdicts.iter().any(Verdict::is_invalid) {
        EXIT_INVALID
    } else if verdicts.iter().any(Verdict::is_unknown) {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    }
}

enum Backend {
    Solver(SolverConfig),
    Oracle(u32),
    Missing,
}

impl Backend {
    fn decide(&self, vcs: &[VerificationCondition], scripts: &[Option<SmtScript>]) -> Vec<Verdict> {
        match self {
            Backend::Oracle(bound) => vcs
                .iter()
                .map(|vc| {
                    brute_force(vc, *bound).unwrap_or_else(|e| {
                        Verdict::Unknown(UnknownReason::SolverError(format!("oracle: {e}")))
                    })
                })
                .collect(),
            Backend::Solver(cfg) => {
                let ready: Vec<SmtScript> = scripts.iter().flatten().cloned().collect();
                let mut solved = solve_all(&ready, cfg).into_iter();
                scripts
                    .iter()
                    .map(|s| match s {
                        Some(_) => solved.next().expect("one verdict per script"),
                        None => untranslatable(),
                    })
                    .collect()
            }
            Backend::Missing => scripts
                .iter()
                .map(|s| match s {
                    Some(_) => Verdict::Unknown(UnknownReason::SolverError(
                        "no solver available".into(),
                    )),
                    None => untranslatable(),
                })
                .collect(),
        }
    }
}

fn untranslatable() -> Verdict {
    Verdict::Unknown(UnknownReason::SolverError("untranslatable VC".into()))
}

struct Loaded {
    source: String,
    index: LineIndex,
    program: Option<SurfaceProgram>,
}

fn position(l: &Loaded, span: Span) -> (usize, usize) {
    l.index.line_col(&l.source, span.start)
}

/// Checks every file, printing diagnostics and summaries to `out` and
/// timing information to `err`. Returns the process exit code.
pub fn run_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let backend = if args.no_solver {
        Backend::Oracle(args.oracle_bound)
    } else {
        match SolverConfig::discover(args.solver.as_deref()) {
            Some(mut cfg) => {
                cfg.timeout_ms = args.timeout;
                cfg.jobs = usize::try_from(args.jobs).unwrap_or(usize::MAX);
                if !args.solver_args.is_empty() {
                    cfg.args = args.solver_args.clone();
                }
                Backend::Solver(cfg)
            }
            None => {
                let _ = writeln!(
                    err,
                    "refine: no SMT solver found; use --solver, set REFINE_SOLVER, or pass --no-solver"
                );
                Backend::Missing
            }
        }
    };
    if args.run.is_some() && args.files.len() != 1 {
        let _ = writeln!(err, "refine: --run needs exactly one input file");
        return EXIT_UNKNOWN;
    }
    if let Some(dir) = &args.dump_smt {
        if let Err(e) = std::fs::create_dir_all(dir) {
            let _ = writeln!(err, "refine: cannot create {}: {e}", dir.display());
            return EXIT_UNKNOWN;
        }
    }

    let mut report = RunReport::default();
    for path in &args.files {
        let (file_report, loaded) = check_file(path, args, &backend, out);
        if let (Some(run), Some(loaded)) = (&args.run, loaded) {
            let mut fr = file_report;
            run_entry(&mut fr, run, &loaded, out);
            report.files.push(fr);
        } else {
            report.files.push(file_report);
        }
    }
    report.wall_ms = start.elapsed().as_millis();
    report.solver = match &backend {
        Backend::Solver(cfg) => cfg.identity(),
        Backend::Oracle(b) => format!("brute-force oracle, bound {b}"),
        Backend::Missing => "none".into(),
    };
    let _ = writeln!(
        err,
        "refine: {} file(s) in {} ms; solver: {}",
        report.files.len(),
        report.wall_ms,
        report.solver
    );
    report.exit_code()
}

fn check_file(
    path: &Path,
    args: &CheckArgs,
    backend: &Backend,
    out: &mut dyn Write,
) -> (FileReport, Option<Loaded>) {
    let mut fr = FileReport::new(path);
    let name = path.display().to_string();
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(out, "{name}: error: cannot read file: {e}");
            fr.infrastructure += 1;
            let _ = writeln!(out, "{}", fr.summary());
            return (fr, None);
        }
    };
    let mut loaded = Loaded {
        index: LineIndex::new(&source),
        source,
        program: None,
    };
    let parsed = match parse(&loaded.source) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "{name}:{e}");
            fr.errors += 1;
            let _ = writeln!(out, "{}", fr.summary());
            return (fr, None);
        }
    };
    let expanded = match expand_aliases(&parsed) {
        Ok(p) => p,
        Err(e) => {
            let (l, c) = position(&loaded, e.span());
            let _ = writeln!(out, "{name}:{l}:{c}: error: {e}");
            fr.errors += 1;
            let _ = writeln!(out, "{}", fr.summary());
            return (fr, None);
        }
    };
    let checked = check_program(&expanded);
    for e in &checked.errors {
        let (l, c) = position(&loaded, e.span());
        let _ = writeln!(out, "{name}:{l}:{c}: error: {e}");
        fr.errors += 1;
    }

    let scripts: Vec<Option<SmtScript>> = checked
        .vcs
        .iter()
        .map(|vc| match translate_vc(vc) {
            Ok(s) => Some(s),
            Err(e) => {
                let (l, c) = position(&loaded, vc.origin.span);
                let _ = writeln!(out, "{name}:{l}:{c}: error: {e}");
                None
            }
        })
        .collect();
    if let Some(dir) = &args.dump_smt {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "input".into());
        for (k, s) in scripts.iter().enumerate() {
            let Some(s) = s else { continue };
            let target = dir.join(format!("{stem}.vc{}.smt2", k + 1));
            if let Err(e) = std::fs::write(&target, s.render()) {
                let _ = writeln!(out, "{name}: error: cannot write {}: {e}", target.display());
                fr.infrastructure += 1;
            }
        }
    }

    let verdicts = backend.decide(&checked.vcs, &scripts);
    for (vc, v) in checked.vcs.iter().zip(&verdicts) {
        fr.record(v);
        if !v.is_valid() {
            let d = Diagnostic::new(&name, &loaded.source, &loaded.index, vc, v);
            let _ = write!(out, "{}", d.render());
        }
    }
    let _ = writeln!(out, "{}", fr.summary());
    if checked.errors.is_empty() {
        loaded.program = Some(expanded);
    }
    (fr, Some(loaded))
}

fn run_entry(fr: &mut FileReport, run: &[String], loaded: &Loaded, out: &mut dyn Write) {
    let name = fr.path.display().to_string();
    let (entry, raw_args) = run.split_first().expect("clap requires an entry");
    let verified = fr.errors == 0 && fr.infrastructure == 0 && fr.valid == fr.vcs;
    let Some(program) = loaded.program.as_ref().filter(|_| verified) else {
        let _ = writeln!(out, "{name}: not running `{entry}`: the program is not fully verified");
        return;
    };
    let mut values = Vec::new();
    for a in raw_args {
        match Value::parse_arg(a) {
            Some(v) => values.push(v),
            None => {
                let _ = writeln!(out, "{name}: error: cannot parse argument `{a}`");
                fr.infrastructure += 1;
                return;
            }
        }
    }
    let erased = erase_program(program);
    match Evaluator::new(&erased).run(entry, &values) {
        Ok((v, steps)) => {
            let shown: Vec<String> = values.iter().map(Value::to_string).collect();
            let _ = writeln!(
                out,
                "{name}: {entry}({}) = {} [{steps}]",
                shown.join(", "),
                v.strip()
            );
        }
        Err(e) => {
            let _ = writeln!(out, "{name}: error: evaluation failed: {e}");
            fr.infrastructure += 1;
        }
    }
}

/// Parses `argv` and runs the selected command.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => match cli.command {
            Command::Check(args) => run_check(&args, out, err),
        },
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            code
        }
    }
}
