//! Predicates over linear integer arithmetic and their translation to SMT-LIB.

pub mod pred;
pub mod smt;

use std::fmt;

pub use pred::{CmpOp, LinearTerm, Operand, Overflow, Predicate};
pub use smt::{print_predicate, translate_vc, Declaration, SmtScript, TranslateError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Int,
    Bool,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Int => "Int",
            Sort::Bool => "Bool",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SortIssue {
    Unbound(String),
    Mismatch {
        name: String,
        expected: Sort,
        found: Sort,
    },
}

impl fmt::Display for SortIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SortIssue::Unbound(x) => write!(f, "unbound variable `{x}`"),
            SortIssue::Mismatch {
                name,
                expected,
                found,
            } => write!(f, "`{name}` is used as {expected} but has sort {found}"),
        }
    }
}

/// Checks that every variable is bound and used at its sort.
pub fn well_sorted(
    p: &Predicate,
    sort_of: &impl Fn(&str) -> Option<Sort>,
) -> Result<(), SortIssue> {
    let expect = |x: &str, want: Sort| match sort_of(x) {
        None => Err(SortIssue::Unbound(x.to_string())),
        Some(s) if s != want => Err(SortIssue::Mismatch {
            name: x.to_string(),
            expected: want,
            found: s,
        }),
        Some(_) => Ok(()),
    };
    match p {
        Predicate::Const(_) => Ok(()),
        Predicate::Var(x) => expect(x, Sort::Bool),
        Predicate::Cmp(_, a, b) => {
            for x in a.vars().chain(b.vars()) {
                expect(x, Sort::Int)?;
            }
            Ok(())
        }
        Predicate::Iff(a, b) | Predicate::Implies(a, b) => {
            well_sorted(a, sort_of)?;
            well_sorted(b, sort_of)
        }
        Predicate::Not(a) => well_sorted(a, sort_of),
        Predicate::And(ps) | Predicate::Or(ps) => {
            ps.iter().try_for_each(|q| well_sorted(q, sort_of))
        }
    }
}
