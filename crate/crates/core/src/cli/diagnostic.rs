use std::collections::HashMap;
use std::fmt::Write as _;

use crate::solver::{Model, Verdict};
use crate::span::{LineIndex, Span};
use crate::typesys::{base_name, VerificationCondition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One non-valid VC, ready to print.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub span: Span,
    pub goal: String,
    pub reason: String,
    pub verdict: Verdict,
    /// Counterexample with internal names mapped back, when invalid.
    pub counterexample: Option<Model>,
}

/// Internal `x!k` names shown as `x` when no other declared name shares the base.
pub fn surface_names(vc: &VerificationCondition) -> HashMap<String, String> {
    let mut count: HashMap<&str, usize> = HashMap::new();
    for (n, _) in &vc.declarations {
        *count.entry(base_name(n)).or_default() += 1;
    }
    vc.declarations
        .iter()
        .map(|(n, _)| {
            let b = base_name(n);
            let shown = if count[b] == 1 { b } else { n.as_str() };
            (n.clone(), shown.to_string())
        })
        .collect()
}

impl Diagnostic {
    pub fn new(
        file: &str,
        source: &str,
        index: &LineIndex,
        vc: &VerificationCondition,
        verdict: &Verdict,
    ) -> Diagnostic {
        let names = surface_names(vc);
        let mut goal = vc.goal.clone();
        for (from, to) in &names {
            if from != to {
                goal = goal.rename(from, to);
            }
        }
        let goal = goal.to_string();
        let counterexample = match verdict {
            Verdict::Invalid(m) => Some(
                m.iter()
                    .map(|(n, v)| (names.get(n).cloned().unwrap_or_else(|| n.to_string()), v))
                    .collect(),
            ),
            _ => None,
        };
        let (line, column) = index.line_col(source, vc.origin.span.start);
        Diagnostic {
            severity: Severity::Error,
            file: file.to_string(),
            line,
            column,
            span: vc.origin.span,
            goal,
            reason: vc.origin.reason.clone(),
            verdict: verdict.clone(),
            counterexample,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}:{}:{}: refinement not provable: {}",
            self.file, self.line, self.column, self.goal
        );
        match (&self.verdict, &self.counterexample) {
            (Verdict::Invalid(_), Some(m)) => {
                let _ = writeln!(s, "  counterexample: {m}");
            }
            (Verdict::Unknown(r), _) => {
                let _ = writeln!(s, "  verdict: unknown ({r})");
            }
            _ => {}
        }
        if !self.reason.is_empty() {
            let _ = writeln!(s, "  note: {}", self.reason);
        }
        s
    }
}
