//! Discharging verification conditions: an external SMT solver process and
//! a brute-force oracle.

pub mod model;
pub mod oracle;
pub mod process;
pub mod sexp;

use std::fmt::{self, Display, Formatter};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use thiserror::Error;

use crate::logic::{SmtScript, Sort};

pub use model::{parse_model, Model, ModelParseError, ModelValue};
pub use oracle::{brute_force, eval_predicate_ground, refutes, EvalError, OracleError};
pub use process::RunError;

pub const DEFAULT_TIMEOUT_MS: u64 = 5000;
pub const SOLVER_ENV: &str = "REFINE_SOLVER";
/// Added to the timeout when waiting for a killed solver to exit.
pub const GRACE: Duration = Duration::from_millis(500);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    Timeout,
    SolverUnknown,
    SolverError(String),
}

impl Display for UnknownReason {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout => f.write_str("timeout"),
            UnknownReason::SolverUnknown => f.write_str("solver-said-unknown"),
            UnknownReason::SolverError(d) => write!(f, "solver-error({d})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// `bounded` is set when only a bounded search backs the claim.
    Valid { bounded: Option<u32> },
    Invalid(Model),
    Unknown(UnknownReason),
}

impl Verdict {
    pub const VALID: Verdict = Verdict::Valid { bounded: None };

    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, Verdict::Invalid(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }
}

impl Display for Verdict {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid { bounded: None } => f.write_str("valid"),
            Verdict::Valid { bounded: Some(b) } => write!(f, "valid (bounded, {b})"),
            Verdict::Invalid(m) => write!(f, "invalid ({m})"),
            Verdict::Unknown(r) => write!(f, "unknown ({r})"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    ModelParse(#[from] ModelParseError),
    #[error("unexpected solver response: {0}")]
    Protocol(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub executable: PathBuf,
    pub args: Vec<String>,
    pub timeout_ms: u64,
    pub jobs: usize,
}

/// Command-line arguments that put a known solver into SMT-LIB stdin mode.
pub fn default_args(exe: &Path) -> Vec<String> {
    let name = exe
        .file_name()
        .map(|s| s.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    if name.starts_with("z3") {
        vec!["-in".into()]
    } else if name.starts_with("cvc") {
        vec!["--lang=smt2".into(), "--produce-models".into()]
    } else {
        vec![]
    }
}

fn search_path(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|d| d.join(name))
        .find(|p| p.is_file())
}

impl SolverConfig {
    pub fn new(executable: impl Into<PathBuf>) -> Self {
        let executable = executable.into();
        SolverConfig {
            args: default_args(&executable),
            executable,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            jobs: 1,
        }
    }

    /// The explicit path if given, else `$REFINE_SOLVER`, else `z3` or
    /// `cvc5` on `PATH`.
    pub fn discover(explicit: Option<&Path>) -> Option<Self> {
        if let Some(p) = explicit {
            return Some(Self::new(p));
        }
        if let Some(p) = std::env::var_os(SOLVER_ENV).filter(|p| !p.is_empty()) {
            let p = PathBuf::from(p);
            let resolved = if p.components().count() == 1 {
                search_path(&p.to_string_lossy()).unwrap_or(p)
            } else {
                p
            };
            return Some(Self::new(resolved));
        }
        ["z3", "cvc5"]
            .iter()
            .find_map(|n| search_path(n))
            .map(Self::new)
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms.max(1))
    }

    /// First line of `--version`, or the path if that fails.
    pub fn identity(&self) -> String {
        let fallback = self.executable.display().to_string();
        match process::run_with_timeout(
            &self.executable,
            &["--version".to_string()],
            "",
            Duration::from_secs(5),
        ) {
            Ok(out) => out
                .stdout
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty())
                .map(|l| format!("{l} ({fallback})"))
                .unwrap_or(fallback),
            Err(_) => fallback,
        }
    }
}

/// Interprets a solver transcript for `script`.
pub fn interpret(script: &SmtScript, stdout: &str) -> Result<Verdict, SolveError> {
    let mut lines = stdout.lines();
    let first = lines
        .by_ref()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("");
    match first {
        "unsat" => Ok(Verdict::VALID),
        "unknown" => Ok(Verdict::Unknown(UnknownReason::SolverUnknown)),
        "sat" => {
            let rest: String = lines.collect::<Vec<_>>().join("\n");
            let constrained: Vec<(String, Sort)> = script
                .constrained_names()
                .into_iter()
                .map(|n| {
                    let s = script.declared().find(|(m, _)| *m == n).unwrap().1;
                    (n.to_string(), s)
                })
                .collect();
            let parsed = parse_model(&rest, &constrained)?;
            let mut model = Model::new();
            for (name, sort) in script.declared() {
                model.insert(
                    name,
                    parsed.get(name).unwrap_or(ModelValue::default_of(sort)),
                );
            }
            Ok(Verdict::Invalid(model))
        }
        other => Err(SolveError::Protocol(excerpt_line(other))),
    }
}

fn excerpt_line(s: &str) -> String {
    let mut out: String = s.chars().take(120).collect();
    if s.chars().count() > 120 {
        out.push_str("...");
    }
    out
}

/// Runs the solver on `script`, reporting infrastructure problems as errors.
pub fn try_solve(script: &SmtScript, cfg: &SolverConfig) -> Result<Verdict, SolveError> {
    let text = script.render();
    let out = process::run_with_timeout(&cfg.executable, &cfg.args, &text, cfg.timeout())?;
    if out.timed_out {
        return Ok(Verdict::Unknown(UnknownReason::Timeout));
    }
    match interpret(script, &out.stdout) {
        Err(SolveError::Protocol(line)) => {
            let detail = out
                .stderr
                .lines()
                .chain(std::iter::once(line.as_str()))
                .map(str::trim)
                .find(|l| !l.is_empty())
                .unwrap_or("no output")
                .to_string();
            Err(SolveError::Protocol(excerpt_line(&detail)))
        }
        r => r,
    }
}

/// Like [`try_solve`], with every failure folded into `Unknown`.
pub fn solve(script: &SmtScript, cfg: &SolverConfig) -> Verdict {
    try_solve(script, cfg).unwrap_or_else(|e| {
        Verdict::Unknown(UnknownReason::SolverError(e.to_string()))
    })
}

/// Solves independent scripts on up to `cfg.jobs` threads. Results are in
/// input order.
pub fn solve_all(scripts: &[SmtScript], cfg: &SolverConfig) -> Vec<Verdict> {
    let jobs = cfg.jobs.clamp(1, scripts.len().max(1));
    if jobs == 1 {
        return scripts.iter().map(|s| solve(s, cfg)).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Verdict>>> = Mutex::new(vec![None; scripts.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(s) = scripts.get(i) else { break };
                let v = solve(s, cfg);
                results.lock().expect("no poisoned lock")[i] = Some(v);
            });
        }
    });
    results
        .into_inner()
        .expect("no poisoned lock")
        .into_iter()
        .map(|v| v.expect("every script solved"))
        .collect()
}
