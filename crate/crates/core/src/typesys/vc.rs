use std::fmt::{self, Display, Formatter};

use crate::logic::{well_sorted, Predicate, SortIssue};
use crate::span::Span;

use super::types::BaseType;

/// Where a verification condition came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub span: Span,
    pub reason: String,
}

/// `declarations, facts |- goal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationCondition {
    pub declarations: Vec<(String, BaseType)>,
    pub facts: Vec<Predicate>,
    pub goal: Predicate,
    pub origin: Origin,
}

impl VerificationCondition {
    pub fn base_of(&self, name: &str) -> Option<BaseType> {
        self.declarations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| *b)
    }

    /// Every free variable is declared once and used at its sort.
    pub fn check_sorts(&self) -> Result<(), SortIssue> {
        for (i, (n, _)) in self.declarations.iter().enumerate() {
            if self.declarations[..i].iter().any(|(m, _)| m == n) {
                return Err(SortIssue::Unbound(format!("{n} (declared twice)")));
            }
        }
        let sort_of = |x: &str| self.base_of(x).map(BaseType::sort);
        for p in self.facts.iter().chain(std::iter::once(&self.goal)) {
            well_sorted(p, &sort_of)?;
        }
        Ok(())
    }
}

impl Display for VerificationCondition {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let decls: Vec<String> = self
            .declarations
            .iter()
            .map(|(n, b)| format!("{n}: {b}"))
            .collect();
        let facts: Vec<String> = self.facts.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "{}; {} |- {}",
            decls.join(", "),
            facts.join(", "),
            self.goal
        )
    }
}
