//! Quantifier-free predicates over linear integer arithmetic and booleans.

use std::fmt::{self, Display, Formatter};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("integer overflow in linear arithmetic")]
pub struct Overflow;

/// `c1*x1 + ... + cn*xn + k` with nonzero coefficients and distinct
/// variables kept in first-occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinearTerm {
    terms: Vec<(i64, String)>,
    constant: i64,
}

impl LinearTerm {
    pub fn constant(k: i64) -> Self {
        LinearTerm {
            terms: vec![],
            constant: k,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        LinearTerm {
            terms: vec![(1, name.into())],
            constant: 0,
        }
    }

    pub fn terms(&self) -> &[(i64, String)] {
        &self.terms
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    pub fn as_constant(&self) -> Option<i64> {
        self.terms.is_empty().then_some(self.constant)
    }

    /// The variable itself when the term is exactly `1*x + 0`.
    pub fn as_var(&self) -> Option<&str> {
        match (self.terms.as_slice(), self.constant) {
            ([(1, x)], 0) => Some(x),
            _ => None,
        }
    }

    pub fn add(&self, other: &LinearTerm) -> Result<LinearTerm, Overflow> {
        let mut out = self.clone();
        for (c, x) in &other.terms {
            out.add_monomial(*c, x)?;
        }
        out.constant = out.constant.checked_add(other.constant).ok_or(Overflow)?;
        Ok(out)
    }

    pub fn sub(&self, other: &LinearTerm) -> Result<LinearTerm, Overflow> {
        self.add(&other.scale(-1)?)
    }

    pub fn scale(&self, k: i64) -> Result<LinearTerm, Overflow> {
        if k == 0 {
            return Ok(LinearTerm::constant(0));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, x) in &self.terms {
            terms.push((c.checked_mul(k).ok_or(Overflow)?, x.clone()));
        }
        Ok(LinearTerm {
            terms,
            constant: self.constant.checked_mul(k).ok_or(Overflow)?,
        })
    }

    pub fn add_constant(&self, k: i64) -> Result<LinearTerm, Overflow> {
        self.add(&LinearTerm::constant(k))
    }

    fn add_monomial(&mut self, c: i64, x: &str) -> Result<(), Overflow> {
        if let Some(i) = self.terms.iter().position(|(_, y)| y == x) {
            let sum = self.terms[i].0.checked_add(c).ok_or(Overflow)?;
            if sum == 0 {
                self.terms.remove(i);
            } else {
                self.terms[i].0 = sum;
            }
        } else if c != 0 {
            self.terms.push((c, x.to_string()));
        }
        Ok(())
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.terms.iter().any(|(_, x)| x == name)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(_, x)| x.as_str())
    }

    /// Replaces `name` by `with`.
    pub fn subst(&self, name: &str, with: &LinearTerm) -> Result<LinearTerm, Overflow> {
        let Some(i) = self.terms.iter().position(|(_, x)| x == name) else {
            return Ok(self.clone());
        };
        let c = self.terms[i].0;
        // rebuild in order so the replacement lands where `name` was
        let mut out = LinearTerm::constant(0);
        for (j, (cj, xj)) in self.terms.iter().enumerate() {
            if j == i {
                for (d, y) in &with.terms {
                    out.add_monomial(c.checked_mul(*d).ok_or(Overflow)?, y)?;
                }
            } else {
                out.add_monomial(*cj, xj)?;
            }
        }
        let extra = c.checked_mul(with.constant).ok_or(Overflow)?;
        out.constant = self.constant.checked_add(extra).ok_or(Overflow)?;
        Ok(out)
    }

    /// Evaluates under an integer assignment.
    pub fn eval<E>(&self, lookup: &impl Fn(&str) -> Result<i64, E>) -> Result<i64, E>
    where
        E: From<Overflow>,
    {
        let mut acc = self.constant;
        for (c, x) in &self.terms {
            let v = lookup(x)?;
            let prod = c.checked_mul(v).ok_or(Overflow)?;
            acc = acc.checked_add(prod).ok_or(Overflow)?;
        }
        Ok(acc)
    }
}

impl Display for LinearTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "{}", self.constant);
        }
        for (i, (c, x)) in self.terms.iter().enumerate() {
            let mag = c.unsigned_abs();
            match (i, *c < 0) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            if mag == 1 {
                f.write_str(x)?;
            } else {
                write!(f, "{mag} * {x}")?;
            }
        }
        match self.constant {
            0 => Ok(()),
            k if k < 0 => write!(f, " - {}", k.unsigned_abs()),
            k => write!(f, " + {k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "/=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

impl From<crate::surface::CmpOp> for CmpOp {
    fn from(op: crate::surface::CmpOp) -> Self {
        use crate::surface::CmpOp as S;
        match op {
            S::Eq => CmpOp::Eq,
            S::Ne => CmpOp::Ne,
            S::Lt => CmpOp::Lt,
            S::Le => CmpOp::Le,
            S::Gt => CmpOp::Gt,
            S::Ge => CmpOp::Ge,
        }
    }
}

/// Boolean formula. Integer atoms are comparisons of linear terms;
/// `Iff` is equality between booleans.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Predicate {
    Const(bool),
    Var(String),
    Cmp(CmpOp, LinearTerm, LinearTerm),
    Iff(Box<Predicate>, Box<Predicate>),
    Not(Box<Predicate>),
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
    Implies(Box<Predicate>, Box<Predicate>),
}

/// A logic-level value: either an integer term or a formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    Int(LinearTerm),
    Bool(Predicate),
}

impl Operand {
    pub fn var(name: &str, boolean: bool) -> Operand {
        if boolean {
            Operand::Bool(Predicate::Var(name.to_string()))
        } else {
            Operand::Int(LinearTerm::var(name))
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        match self {
            Operand::Int(t) => t.vars().map(str::to_string).collect(),
            Operand::Bool(p) => p.free_vars(),
        }
    }
}

impl Display for Operand {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Int(t) => t.fmt(f),
            Operand::Bool(p) => p.fmt(f),
        }
    }
}

impl Predicate {
    pub fn tt() -> Predicate {
        Predicate::Const(true)
    }

    pub fn cmp(op: CmpOp, a: LinearTerm, b: LinearTerm) -> Predicate {
        Predicate::Cmp(op, a, b)
    }

    pub fn not(p: Predicate) -> Predicate {
        Predicate::Not(Box::new(p))
    }

    pub fn implies(a: Predicate, b: Predicate) -> Predicate {
        Predicate::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Predicate, b: Predicate) -> Predicate {
        Predicate::Iff(Box::new(a), Box::new(b))
    }

    /// Conjunction that drops `true` conjuncts and flattens nested `And`s.
    pub fn and(parts: impl IntoIterator<Item = Predicate>) -> Predicate {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Predicate::Const(true) => {}
                Predicate::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Predicate::tt(),
            1 => out.pop().unwrap(),
            _ => Predicate::And(out),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Predicate::Const(true))
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        let mut push = |x: &str| {
            if !out.iter().any(|y| y == x) {
                out.push(x.to_string());
            }
        };
        match self {
            Predicate::Const(_) => {}
            Predicate::Var(x) => push(x),
            Predicate::Cmp(_, a, b) => {
                for x in a.vars().chain(b.vars()) {
                    push(x);
                }
            }
            Predicate::Iff(a, b) | Predicate::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Predicate::Not(a) => a.collect_vars(out),
            Predicate::And(ps) | Predicate::Or(ps) => {
                for p in ps {
                    p.collect_vars(out);
                }
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.free_vars().iter().any(|x| x == name)
    }

    /// Replaces every occurrence of `name` by `with`. Integer positions take
    /// an `Operand::Int`, boolean positions an `Operand::Bool`; an operand of
    /// the other sort leaves that position unchanged.
    pub fn subst(&self, name: &str, with: &Operand) -> Result<Predicate, Overflow> {
        Ok(match self {
            Predicate::Const(_) => self.clone(),
            Predicate::Var(x) => match with {
                Operand::Bool(p) if x == name => p.clone(),
                _ => self.clone(),
            },
            Predicate::Cmp(op, a, b) => match with {
                Operand::Int(t) => Predicate::Cmp(*op, a.subst(name, t)?, b.subst(name, t)?),
                Operand::Bool(_) => self.clone(),
            },
            Predicate::Iff(a, b) => Predicate::iff(a.subst(name, with)?, b.subst(name, with)?),
            Predicate::Implies(a, b) => {
                Predicate::implies(a.subst(name, with)?, b.subst(name, with)?)
            }
            Predicate::Not(a) => Predicate::not(a.subst(name, with)?),
            Predicate::And(ps) => Predicate::And(
                ps.iter()
                    .map(|p| p.subst(name, with))
                    .collect::<Result<_, _>>()?,
            ),
            Predicate::Or(ps) => Predicate::Or(
                ps.iter()
                    .map(|p| p.subst(name, with))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// Renames a variable in both integer and boolean positions.
    pub fn rename(&self, from: &str, to: &str) -> Predicate {
        let p = self
            .subst(from, &Operand::Int(LinearTerm::var(to)))
            .expect("renaming cannot overflow");
        p.subst(from, &Operand::Bool(Predicate::Var(to.to_string())))
            .expect("renaming cannot overflow")
    }
}

const P_IMPLIES: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_NOT: u8 = 4;
const P_CMP: u8 = 5;
const P_ATOM: u8 = 10;

fn plevel(p: &Predicate) -> u8 {
    match p {
        Predicate::Const(_) | Predicate::Var(_) => P_ATOM,
        Predicate::Cmp(..) | Predicate::Iff(..) => P_CMP,
        Predicate::Not(_) => P_NOT,
        Predicate::And(v) if v.is_empty() => P_ATOM,
        Predicate::And(_) => P_AND,
        Predicate::Or(v) if v.is_empty() => P_ATOM,
        Predicate::Or(_) => P_OR,
        Predicate::Implies(..) => P_IMPLIES,
    }
}

fn pred_at(f: &mut Formatter<'_>, p: &Predicate, min: u8) -> fmt::Result {
    if plevel(p) < min {
        write!(f, "(")?;
        pred_raw(f, p)?;
        write!(f, ")")
    } else {
        pred_raw(f, p)
    }
}

fn pred_raw(f: &mut Formatter<'_>, p: &Predicate) -> fmt::Result {
    match p {
        Predicate::Const(b) => write!(f, "{b}"),
        Predicate::Var(x) => f.write_str(x),
        Predicate::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
        Predicate::Iff(a, b) => {
            pred_at(f, a, P_CMP + 1)?;
            f.write_str(" == ")?;
            pred_at(f, b, P_CMP + 1)
        }
        Predicate::Not(a) => {
            f.write_str("!")?;
            pred_at(f, a, P_NOT)
        }
        Predicate::And(ps) | Predicate::Or(ps) => {
            let (sep, lvl, empty) = match p {
                Predicate::And(_) => (" && ", P_AND, "true"),
                _ => (" || ", P_OR, "false"),
            };
            if ps.is_empty() {
                return f.write_str(empty);
            }
            for (i, q) in ps.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                pred_at(f, q, lvl + 1)?;
            }
            Ok(())
        }
        Predicate::Implies(a, b) => {
            pred_at(f, a, P_OR)?;
            f.write_str(" => ")?;
            pred_at(f, b, P_IMPLIES)
        }
    }
}

/// Infix rendering in the surface syntax, e.g. `x < n + 1`.
impl Display for Predicate {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        pred_at(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> LinearTerm {
        LinearTerm::var(x)
    }

    #[test]
    fn linear_arithmetic_normalizes() {
        let t = v("x").add(&v("n")).unwrap().add(&v("x").scale(2).unwrap()).unwrap();
        assert_eq!(t.terms(), &[(3, "x".to_string()), (1, "n".to_string())]);
        let z = t.sub(&t).unwrap();
        assert_eq!(z.as_constant(), Some(0));
        assert_eq!(v("n").add_constant(1).unwrap().to_string(), "n + 1");
        assert_eq!(
            v("x").scale(-2).unwrap().add_constant(-3).unwrap().to_string(),
            "-2 * x - 3"
        );
    }

    #[test]
    fn substitution_scales_replacement() {
        // 2*x + y with x := n + 1  ->  2*n + y + 2
        let t = v("x").scale(2).unwrap().add(&v("y")).unwrap();
        let s = t.subst("x", &v("n").add_constant(1).unwrap()).unwrap();
        assert_eq!(s.to_string(), "2 * n + y + 2");
    }

    #[test]
    fn overflow_is_reported() {
        let big = LinearTerm::constant(i64::MAX);
        assert_eq!(big.add_constant(1), Err(Overflow));
        assert_eq!(v("x").scale(i64::MAX).unwrap().scale(2), Err(Overflow));
    }

    #[test]
    fn predicate_display_and_rename() {
        let p = Predicate::and([
            Predicate::cmp(CmpOp::Lt, v("x"), v("n")),
            Predicate::iff(Predicate::Var("b".into()), Predicate::Const(true)),
        ]);
        assert_eq!(p.to_string(), "x < n && b == true");
        assert_eq!(p.rename("x", "y").to_string(), "y < n && b == true");
        assert_eq!(p.rename("b", "c").to_string(), "x < n && c == true");
        assert_eq!(p.free_vars(), vec!["x", "n", "b"]);
    }

    #[test]
    fn and_flattens_and_drops_true() {
        let a = Predicate::cmp(CmpOp::Lt, v("x"), v("n"));
        assert_eq!(Predicate::and([Predicate::tt(), a.clone()]), a);
        assert!(Predicate::and([]).is_true());
    }
}
