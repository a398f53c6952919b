//! SMT-LIB v2 emission.
//!
//! One self-contained script per verification condition:
//!
//! ```text
//! (set-logic QF_LIA)
//! (declare-const n Int)
//! (declare-const x Int)
//! (assert (>= n 0))
//! (assert (>= x 0))
//! (assert (< x n))
//! (assert (not (< x (+ n 1))))
//! (check-sat)
//! (get-model)
//! ```
//!
//! `Nat` constants are declared as `Int` with a `(>= v 0)` assertion. The
//! negated goal is always the last assertion, so `unsat` means the
//! implication is valid.

use std::borrow::Cow;
use std::fmt::{self, Display, Formatter, Write};

use thiserror::Error;

use super::pred::{CmpOp, LinearTerm, Predicate};
use super::{well_sorted, Sort};
use crate::span::Span;
use crate::typesys::{BaseType, VerificationCondition};

pub const LOGIC: &str = "QF_LIA";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("cannot translate predicate: {detail}")]
    UnsupportedPredicate { span: Span, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub base: BaseType,
}

impl Declaration {
    pub fn sort(&self) -> Sort {
        self.base.sort()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmtScript {
    pub logic: String,
    pub declarations: Vec<Declaration>,
    /// Nat side conditions, then hypotheses, then the negated goal.
    pub assertions: Vec<Predicate>,
}

impl SmtScript {
    /// The final assertion, `(not goal)`.
    pub fn negated_goal(&self) -> &Predicate {
        self.assertions.last().expect("script always asserts its goal")
    }

    pub fn declared(&self) -> impl Iterator<Item = (&str, Sort)> {
        self.declarations.iter().map(|d| (d.name.as_str(), d.sort()))
    }

    /// Declared names that occur free in some assertion.
    pub fn constrained_names(&self) -> Vec<&str> {
        let mentioned: Vec<String> = self.assertions.iter().flat_map(|a| a.free_vars()).collect();
        self.declarations
            .iter()
            .map(|d| d.name.as_str())
            .filter(|n| mentioned.iter().any(|m| m == n))
            .collect()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl Display for SmtScript {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(set-logic {})", self.logic)?;
        for d in &self.declarations {
            let sort = match d.sort() {
                Sort::Int => "Int",
                Sort::Bool => "Bool",
            };
            writeln!(f, "(declare-const {} {sort})", symbol(&d.name))?;
        }
        for a in &self.assertions {
            writeln!(f, "(assert {})", print_predicate(a))?;
        }
        writeln!(f, "(check-sat)")?;
        writeln!(f, "(get-model)")
    }
}

/// Builds the script asserting the hypotheses of `vc` and the negation of its goal.
pub fn translate_vc(vc: &VerificationCondition) -> Result<SmtScript, TranslateError> {
    let span = vc.origin.span;
    let unsupported = |detail: String| TranslateError::UnsupportedPredicate { span, detail };
    let mut declarations: Vec<Declaration> = Vec::with_capacity(vc.declarations.len());
    for (name, base) in &vc.declarations {
        if declarations.iter().any(|d| &d.name == name) {
            return Err(unsupported(format!("`{name}` is declared twice")));
        }
        if name.is_empty() {
            return Err(unsupported("empty symbol name".into()));
        }
        declarations.push(Declaration {
            name: name.clone(),
            base: *base,
        });
    }
    let sort_of = |x: &str| {
        declarations
            .iter()
            .find(|d| d.name == x)
            .map(Declaration::sort)
    };
    for p in vc.facts.iter().chain(std::iter::once(&vc.goal)) {
        well_sorted(p, &sort_of).map_err(|e| unsupported(e.to_string()))?;
    }
    let mut assertions = Vec::new();
    for d in &declarations {
        if d.base == BaseType::Nat {
            assertions.push(Predicate::cmp(
                CmpOp::Ge,
                LinearTerm::var(&d.name),
                LinearTerm::constant(0),
            ));
        }
    }
    assertions.extend(vc.facts.iter().filter(|p| !p.is_true()).cloned());
    assertions.push(Predicate::not(vc.goal.clone()));
    Ok(SmtScript {
        logic: LOGIC.to_string(),
        declarations,
        assertions,
    })
}

const RESERVED: &[&str] = &[
    // reserved words
    "!", "_", "as", "BINARY", "DECIMAL", "exists", "HEXADECIMAL", "forall", "let", "match",
    "NUMERAL", "par", "STRING",
    // commands
    "assert", "check-sat", "declare-const", "declare-fun", "define-fun", "exit", "get-model",
    "get-value", "pop", "push", "set-logic", "set-option",
    // Core and Ints symbols
    "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite", "-", "+", "*",
    "div", "mod", "abs", "<", "<=", ">", ">=", "Int", "Bool",
];

fn is_simple_symbol(s: &str) -> bool {
    let extra = "~!@$%^&*_-+=<>.?/";
    !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || extra.contains(c))
}

/// The SMT-LIB spelling of a name: unchanged when it is a legal simple
/// symbol, `|quoted|` otherwise.
pub fn symbol(name: &str) -> Cow<'_, str> {
    if is_simple_symbol(name) && !RESERVED.contains(&name) {
        Cow::Borrowed(name)
    } else {
        Cow::Owned(format!("|{name}|"))
    }
}

fn write_int(out: &mut String, k: i64) {
    if k < 0 {
        let _ = write!(out, "(- {})", k.unsigned_abs());
    } else {
        let _ = write!(out, "{k}");
    }
}

fn write_linear(out: &mut String, t: &LinearTerm) {
    let mut parts: Vec<String> = Vec::new();
    for (c, x) in t.terms() {
        let sym = symbol(x);
        parts.push(match *c {
            1 => sym.into_owned(),
            -1 => format!("(- {sym})"),
            c => {
                let mut k = String::new();
                write_int(&mut k, c);
                format!("(* {k} {sym})")
            }
        });
    }
    if t.constant_part() != 0 || parts.is_empty() {
        let mut k = String::new();
        write_int(&mut k, t.constant_part());
        parts.push(k);
    }
    if parts.len() == 1 {
        out.push_str(&parts[0]);
    } else {
        out.push_str("(+");
        for p in parts {
            out.push(' ');
            out.push_str(&p);
        }
        out.push(')');
    }
}

fn write_pred(out: &mut String, p: &Predicate) {
    match p {
        Predicate::Const(b) => {
            let _ = write!(out, "{b}");
        }
        Predicate::Var(x) => out.push_str(&symbol(x)),
        Predicate::Cmp(op, a, b) => {
            let head = match op {
                CmpOp::Eq | CmpOp::Ne => "=",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            if *op == CmpOp::Ne {
                out.push_str("(not ");
            }
            let _ = write!(out, "({head} ");
            write_linear(out, a);
            out.push(' ');
            write_linear(out, b);
            out.push(')');
            if *op == CmpOp::Ne {
                out.push(')');
            }
        }
        Predicate::Iff(a, b) => {
            out.push_str("(= ");
            write_pred(out, a);
            out.push(' ');
            write_pred(out, b);
            out.push(')');
        }
        Predicate::Not(a) => {
            out.push_str("(not ");
            write_pred(out, a);
            out.push(')');
        }
        Predicate::And(ps) | Predicate::Or(ps) => {
            let (head, empty) = match p {
                Predicate::And(_) => ("and", "true"),
                _ => ("or", "false"),
            };
            match ps.len() {
                0 => out.push_str(empty),
                1 => write_pred(out, &ps[0]),
                _ => {
                    let _ = write!(out, "({head}");
                    for q in ps {
                        out.push(' ');
                        write_pred(out, q);
                    }
                    out.push(')');
                }
            }
        }
        Predicate::Implies(a, b) => {
            out.push_str("(=> ");
            write_pred(out, a);
            out.push(' ');
            write_pred(out, b);
            out.push(')');
        }
    }
}

/// Fully parenthesized SMT-LIB term for `p`.
pub fn print_predicate(p: &Predicate) -> String {
    let mut out = String::new();
    write_pred(&mut out, p);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> LinearTerm {
        LinearTerm::var(x)
    }

    #[test]
    fn prints_successor_bound() {
        let p = Predicate::cmp(CmpOp::Lt, v("x"), v("n").add_constant(1).unwrap());
        assert_eq!(print_predicate(&p), "(< x (+ n 1))");
    }

    #[test]
    fn prints_constants_and_scaled_terms() {
        assert_eq!(print_predicate(&Predicate::tt()), "true");
        let lhs = v("x").scale(2).unwrap().add_constant(3).unwrap();
        let p = Predicate::cmp(CmpOp::Le, lhs, v("y"));
        assert_eq!(print_predicate(&p), "(<= (+ (* 2 x) 3) y)");
    }

    #[test]
    fn prints_negative_and_disequality() {
        let lhs = v("x").scale(-1).unwrap().add_constant(-4).unwrap();
        let p = Predicate::cmp(CmpOp::Ne, lhs, v("y").scale(-3).unwrap());
        assert_eq!(print_predicate(&p), "(not (= (+ (- x) (- 4)) (* (- 3) y)))");
        let b = Predicate::iff(Predicate::Var("b".into()), Predicate::Const(true));
        assert_eq!(print_predicate(&b), "(= b true)");
    }

    #[test]
    fn quotes_reserved_and_odd_symbols() {
        assert_eq!(symbol("x!2"), "x!2");
        assert_eq!(symbol("not"), "|not|");
        assert_eq!(symbol("assert"), "|assert|");
        assert_eq!(symbol("_"), "|_|");
        assert_eq!(symbol("x_1"), "x_1");
    }
}
