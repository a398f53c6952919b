//! Pretty-printer producing source text that parses back to the same tree.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;

const P_OPEN: u8 = 0;
const P_IMPLIES: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_NOT: u8 = 4;
const P_CMP: u8 = 5;
const P_ADD: u8 = 6;
const P_MUL: u8 = 7;
const P_UNARY: u8 = 8;
const P_APP: u8 = 9;
const P_ATOM: u8 = 10;

fn level(t: &Term) -> u8 {
    use TermKind::*;
    match &t.kind {
        Var(_) | NatLit(_) | BoolLit(_) | Pair { .. } | Annot(..) => P_ATOM,
        IntLit(_) => P_UNARY,
        App(..) => P_APP,
        Scale(..) => P_MUL,
        Arith(..) => P_ADD,
        Cmp(..) => P_CMP,
        Not(_) => P_NOT,
        Logic(LogicOp::And, ..) => P_AND,
        Logic(LogicOp::Or, ..) => P_OR,
        Logic(LogicOp::Implies, ..) => P_IMPLIES,
        Lam { .. } | Let { .. } | If { .. } | Match { .. } => P_OPEN,
    }
}

fn term_at(f: &mut Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    if level(t) < min {
        f.write_char('(')?;
        term_raw(f, t)?;
        f.write_char(')')
    } else {
        term_raw(f, t)
    }
}

fn int_lit(f: &mut Formatter<'_>, k: i64) -> fmt::Result {
    if k <= 0 {
        write!(f, "-{}", k.unsigned_abs())
    } else {
        write!(f, "{k}")
    }
}

fn term_raw(f: &mut Formatter<'_>, t: &Term) -> fmt::Result {
    use TermKind::*;
    match &t.kind {
        Var(x) => f.write_str(x),
        NatLit(k) => write!(f, "{k}"),
        IntLit(k) => int_lit(f, *k),
        BoolLit(b) => write!(f, "{b}"),
        Arith(op, a, b) => {
            term_at(f, a, P_ADD)?;
            f.write_str(match op {
                ArithOp::Add => " + ",
                ArithOp::Sub => " - ",
            })?;
            term_at(f, b, P_MUL)
        }
        Scale(k, e) => {
            if *k < 0 {
                int_lit(f, *k)?;
            } else {
                write!(f, "{k}")?;
            }
            f.write_str(" * ")?;
            term_at(f, e, P_UNARY)
        }
        Cmp(op, a, b) => {
            term_at(f, a, P_ADD)?;
            write!(f, " {} ", op.symbol())?;
            term_at(f, b, P_ADD)
        }
        Not(e) => {
            f.write_char('!')?;
            term_at(f, e, P_NOT)
        }
        Logic(op, a, b) => {
            let (l, r) = match op {
                LogicOp::And => (P_AND, P_NOT),
                LogicOp::Or => (P_OR, P_AND),
                LogicOp::Implies => (P_OR, P_IMPLIES),
            };
            term_at(f, a, l)?;
            write!(f, " {} ", op.symbol())?;
            term_at(f, b, r)
        }
        App(g, a) => {
            term_at(f, g, P_APP)?;
            f.write_char(' ')?;
            term_at(f, a, P_ATOM)
        }
        Lam {
            param,
            annotation,
            body,
        } => {
            f.write_str("fn ")?;
            match annotation {
                Some(ty) => write!(f, "({param} : {ty})")?,
                None => f.write_str(param)?,
            }
            f.write_str(" => ")?;
            term_at(f, body, P_OPEN)
        }
        Let { name, bound, body } => {
            write!(f, "let {name} = ")?;
            term_at(f, bound, P_OPEN)?;
            f.write_str(" in ")?;
            term_at(f, body, P_OPEN)
        }
        If {
            cond,
            then_branch,
            else_branch,
        } => {
            f.write_str("if ")?;
            term_at(f, cond, P_OPEN)?;
            f.write_str(" then ")?;
            term_at(f, then_branch, P_OPEN)?;
            f.write_str(" else ")?;
            term_at(f, else_branch, P_OPEN)
        }
        Match {
            scrutinee,
            zero_branch,
            suc_binder,
            suc_branch,
        } => {
            f.write_str("match ")?;
            term_at(f, scrutinee, P_OPEN)?;
            f.write_str(" with | zero => ")?;
            term_at(f, zero_branch, P_IMPLIES)?;
            write!(f, " | suc {suc_binder} => ")?;
            term_at(f, suc_branch, P_OPEN)
        }
        Pair { value, proof } => {
            f.write_char('(')?;
            term_at(f, value, P_OPEN)?;
            match proof {
                Proof::Auto => f.write_str(", auto)"),
                Proof::Erased => f.write_str(", erased)"),
            }
        }
        Annot(e, ty) => {
            f.write_char('(')?;
            term_at(f, e, P_OPEN)?;
            write!(f, " : {ty})")
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        term_at(f, self, P_OPEN)
    }
}

impl Display for SurfaceType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TypeKind::Base(b) => write!(f, "{b}"),
            TypeKind::Refined { binder, base, pred } => {
                write!(f, "{{{binder}: {base} | ")?;
                term_at(f, pred, P_OPEN)?;
                f.write_char('}')
            }
            TypeKind::Fun {
                param: Some(p),
                domain,
                codomain,
            } => write!(f, "({p} : {domain}) -> {codomain}"),
            TypeKind::Fun {
                param: None,
                domain,
                codomain,
            } => {
                if matches!(domain.kind, TypeKind::Fun { .. }) {
                    write!(f, "({domain}) -> {codomain}")
                } else {
                    write!(f, "{domain} -> {codomain}")
                }
            }
            TypeKind::Alias { name, arg: None } => f.write_str(name),
            TypeKind::Alias {
                name,
                arg: Some(arg),
            } => {
                write!(f, "{name}(")?;
                term_at(f, arg, P_OPEN)?;
                f.write_char(')')
            }
        }
    }
}

impl Display for Item {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Item::Alias(a) => {
                write!(f, "type {}", a.name)?;
                if let Some(p) = &a.param {
                    write!(f, "({p})")?;
                }
                write!(f, " = {}", a.body)
            }
            Item::Fun(d) => {
                write!(f, "fun {}", d.name)?;
                for p in &d.params {
                    write!(f, " ({} : {})", p.name, p.ty)?;
                }
                write!(f, " : {} = {}", d.ret, d.body)
            }
            Item::Val(v) => write!(f, "val {} : {} = {}", v.name, v.ty, v.body),
        }
    }
}

impl Display for SurfaceProgram {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        Ok(())
    }
}

/// Single-line rendering capped at `max` characters, for diagnostics.
pub fn excerpt(t: &Term, max: usize) -> String {
    let s = t.to_string();
    if s.chars().count() <= max {
        s
    } else {
        let mut out: String = s.chars().take(max.saturating_sub(3)).collect();
        out.push_str("...");
        out
    }
}
