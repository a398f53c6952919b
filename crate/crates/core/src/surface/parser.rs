//! Recursive-descent parser for `.rfn` source.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::span::{LineIndex, Span};
use crate::typesys::BaseType;

/// Nesting limit for terms and types; deeper input is rejected rather than
/// risking stack exhaustion.
pub const MAX_DEPTH: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: syntax error: {message}")]
pub struct SyntaxError {
    pub span: Span,
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Tokens that would have been accepted at the error position.
    pub expected: Vec<String>,
}

type PResult<T> = Result<T, SyntaxError>;

/// Parses a whole program.
pub fn parse(source: &str) -> Result<SurfaceProgram, SyntaxError> {
    let tokens = tokenize(source).map_err(|e| {
        let (line, column) = LineIndex::new(source).line_col(source, e.offset);
        SyntaxError {
            span: Span::new(e.offset, e.offset),
            line,
            column,
            message: e.message,
            expected: vec![],
        }
    })?;
    let mut p = Parser::new(source, tokens);
    p.program()
}

/// Parses a single type, e.g. `{x: Nat | x < n}`.
pub fn parse_type(source: &str) -> Result<SurfaceType, SyntaxError> {
    parse_fragment(source, Parser::ty)
}

/// Parses a single term.
pub fn parse_term(source: &str) -> Result<Term, SyntaxError> {
    parse_fragment(source, Parser::term)
}

fn parse_fragment<'s, T>(
    source: &'s str,
    f: impl FnOnce(&mut Parser<'s>) -> PResult<T>,
) -> Result<T, SyntaxError> {
    let tokens = tokenize(source).map_err(|e| {
        let (line, column) = LineIndex::new(source).line_col(source, e.offset);
        SyntaxError {
            span: Span::new(e.offset, e.offset),
            line,
            column,
            message: e.message,
            expected: vec![],
        }
    })?;
    let mut p = Parser::new(source, tokens);
    let out = f(&mut p)?;
    p.expect(&Tok::Eof)?;
    Ok(out)
}

struct Parser<'s> {
    source: &'s str,
    lines: LineIndex,
    tokens: Vec<Token>,
    pos: usize,
    prev_end: usize,
    expected: BTreeSet<String>,
    depth: usize,
}

impl<'s> Parser<'s> {
    fn new(source: &'s str, tokens: Vec<Token>) -> Self {
        Parser {
            source,
            lines: LineIndex::new(source),
            tokens,
            pos: 0,
            prev_end: 0,
            expected: BTreeSet::new(),
            depth: 0,
        }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        self.prev_end = t.span.end;
        self.expected.clear();
        t
    }

    fn at(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            true
        } else {
            self.expected.insert(tok.describe());
            false
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> PResult<Span> {
        if self.at(tok) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected())
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        if let Tok::Ident(name) = self.peek() {
            let name = name.clone();
            let span = self.bump().span;
            Ok((name, span))
        } else {
            self.expected.insert("identifier".into());
            Err(self.unexpected())
        }
    }

    fn since(&self, start: usize) -> Span {
        Span::new(start, self.prev_end.max(start))
    }

    fn error_at(&self, span: Span, message: String) -> SyntaxError {
        let (line, column) = self.lines.line_col(self.source, span.start);
        SyntaxError {
            span,
            line,
            column,
            message,
            expected: self.expected.iter().cloned().collect(),
        }
    }

    fn unexpected(&self) -> SyntaxError {
        let found = self.peek().describe();
        let mut message = format!("unexpected {found}");
        if !self.expected.is_empty() {
            let list: Vec<&str> = self.expected.iter().map(String::as_str).collect();
            message.push_str(&format!(", expected one of: {}", list.join(", ")));
        }
        self.error_at(self.span(), message)
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        if self.depth >= MAX_DEPTH {
            return Err(self.error_at(self.span(), "nesting too deep".into()));
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    // ---- items ----

    fn program(&mut self) -> PResult<SurfaceProgram> {
        let mut items = Vec::new();
        loop {
            while self.eat(&Tok::Semi) {}
            if self.at(&Tok::Eof) {
                break;
            }
            let item = match self.peek() {
                Tok::Type => Item::Alias(self.alias()?),
                Tok::Fun => Item::Fun(self.fun_def()?),
                Tok::Val => Item::Val(self.val_def()?),
                _ => {
                    for t in [Tok::Type, Tok::Fun, Tok::Val] {
                        self.expected.insert(t.describe());
                    }
                    return Err(self.unexpected());
                }
            };
            items.push(item);
        }
        Ok(SurfaceProgram { items })
    }

    fn alias(&mut self) -> PResult<AliasDef> {
        let start = self.expect(&Tok::Type)?.start;
        let (name, _) = self.ident()?;
        let param = if self.eat(&Tok::LParen) {
            let (p, _) = self.ident()?;
            self.expect(&Tok::RParen)?;
            Some(p)
        } else {
            None
        };
        self.expect(&Tok::Assign)?;
        let body = self.ty()?;
        Ok(AliasDef {
            name,
            param,
            body,
            span: self.since(start),
        })
    }

    fn fun_def(&mut self) -> PResult<FunDef> {
        let start = self.expect(&Tok::Fun)?.start;
        let (name, _) = self.ident()?;
        let mut params = Vec::new();
        while self.at(&Tok::LParen) {
            let pstart = self.bump().span.start;
            let (pname, _) = self.ident()?;
            self.expect(&Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(&Tok::RParen)?;
            params.push(Param {
                name: pname,
                ty,
                span: self.since(pstart),
            });
        }
        if params.is_empty() {
            return Err(self.unexpected());
        }
        self.expect(&Tok::Colon)?;
        let ret = self.ty()?;
        self.expect(&Tok::Assign)?;
        let body = self.term()?;
        Ok(FunDef {
            name,
            params,
            ret,
            body,
            span: self.since(start),
        })
    }

    fn val_def(&mut self) -> PResult<ValDef> {
        let start = self.expect(&Tok::Val)?.start;
        let (name, _) = self.ident()?;
        self.expect(&Tok::Colon)?;
        let ty = self.ty()?;
        self.expect(&Tok::Assign)?;
        let body = self.term()?;
        Ok(ValDef {
            name,
            ty,
            body,
            span: self.since(start),
        })
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<SurfaceType> {
        self.nested(|p| p.ty_inner())
    }

    fn ty_inner(&mut self) -> PResult<SurfaceType> {
        let start = self.span().start;
        let dependent = self.peek() == &Tok::LParen
            && matches!(self.peek_at(1), Tok::Ident(_))
            && self.peek_at(2) == &Tok::Colon;
        if dependent {
            self.bump();
            let (param, _) = self.ident()?;
            self.expect(&Tok::Colon)?;
            let domain = self.ty()?;
            self.expect(&Tok::RParen)?;
            self.expect(&Tok::Arrow)?;
            let codomain = self.ty()?;
            return Ok(SurfaceType::new(
                TypeKind::Fun {
                    param: Some(param),
                    domain: Box::new(domain),
                    codomain: Box::new(codomain),
                },
                self.since(start),
            ));
        }
        let atom = self.ty_atom()?;
        if self.eat(&Tok::Arrow) {
            let codomain = self.ty()?;
            Ok(SurfaceType::new(
                TypeKind::Fun {
                    param: None,
                    domain: Box::new(atom),
                    codomain: Box::new(codomain),
                },
                self.since(start),
            ))
        } else {
            Ok(atom)
        }
    }

    fn base(&mut self) -> Option<BaseType> {
        let b = match self.peek() {
            Tok::Nat => BaseType::Nat,
            Tok::IntTy => BaseType::Int,
            Tok::Bool => BaseType::Bool,
            _ => {
                for t in [Tok::Nat, Tok::IntTy, Tok::Bool] {
                    self.expected.insert(t.describe());
                }
                return None;
            }
        };
        self.bump();
        Some(b)
    }

    fn ty_atom(&mut self) -> PResult<SurfaceType> {
        let start = self.span().start;
        if let Some(b) = self.base() {
            return Ok(SurfaceType::new(TypeKind::Base(b), self.since(start)));
        }
        if self.eat(&Tok::LBrace) {
            let (binder, _) = self.ident()?;
            self.expect(&Tok::Colon)?;
            let base = match self.base() {
                Some(b) => b,
                None => return Err(self.unexpected()),
            };
            self.expect(&Tok::Bar)?;
            let pred = self.term()?;
            self.expect(&Tok::RBrace)?;
            return Ok(SurfaceType::new(
                TypeKind::Refined {
                    binder,
                    base,
                    pred: Box::new(pred),
                },
                self.since(start),
            ));
        }
        if let Tok::Ident(_) = self.peek() {
            let (name, _) = self.ident()?;
            let arg = if self.eat(&Tok::LParen) {
                let a = self.term()?;
                self.expect(&Tok::RParen)?;
                Some(Box::new(a))
            } else {
                None
            };
            return Ok(SurfaceType::new(
                TypeKind::Alias { name, arg },
                self.since(start),
            ));
        }
        self.expected.insert("identifier".into());
        if self.eat(&Tok::LParen) {
            let mut inner = self.ty()?;
            self.expect(&Tok::RParen)?;
            inner.span = self.since(start);
            return Ok(inner);
        }
        Err(self.unexpected())
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<Term> {
        self.nested(|p| p.term_inner())
    }

    fn term_inner(&mut self) -> PResult<Term> {
        let start = self.span().start;
        match self.peek() {
            Tok::Let => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect(&Tok::Assign)?;
                let bound = self.term()?;
                self.expect(&Tok::In)?;
                let body = self.term()?;
                Ok(Term::new(
                    TermKind::Let {
                        name,
                        bound: Box::new(bound),
                        body: Box::new(body),
                    },
                    self.since(start),
                ))
            }
            Tok::If => {
                self.bump();
                let cond = self.term()?;
                self.expect(&Tok::Then)?;
                let then_branch = self.term()?;
                self.expect(&Tok::Else)?;
                let else_branch = self.term()?;
                Ok(Term::new(
                    TermKind::If {
                        cond: Box::new(cond),
                        then_branch: Box::new(then_branch),
                        else_branch: Box::new(else_branch),
                    },
                    self.since(start),
                ))
            }
            Tok::Match => self.match_term(start),
            Tok::Fn => {
                self.bump();
                let (param, annotation) = if self.eat(&Tok::LParen) {
                    let (param, _) = self.ident()?;
                    self.expect(&Tok::Colon)?;
                    let ty = self.ty()?;
                    self.expect(&Tok::RParen)?;
                    (param, Some(ty))
                } else {
                    (self.ident()?.0, None)
                };
                self.expect(&Tok::FatArrow)?;
                let body = self.term()?;
                Ok(Term::new(
                    TermKind::Lam {
                        param,
                        annotation,
                        body: Box::new(body),
                    },
                    self.since(start),
                ))
            }
            _ => self.implies(),
        }
    }

    fn match_term(&mut self, start: usize) -> PResult<Term> {
        self.expect(&Tok::Match)?;
        let scrutinee = self.term()?;
        self.expect(&Tok::With)?;
        self.eat(&Tok::Bar);
        let mut zero = None;
        let mut suc = None;
        for i in 0..2 {
            if i == 1 {
                self.expect(&Tok::Bar)?;
            }
            let arm_span = self.span();
            if self.eat(&Tok::Zero) {
                if zero.is_some() {
                    return Err(self.error_at(arm_span, "duplicate `zero` branch".into()));
                }
                self.expect(&Tok::FatArrow)?;
                zero = Some(self.term()?);
            } else if self.eat(&Tok::Suc) {
                if suc.is_some() {
                    return Err(self.error_at(arm_span, "duplicate `suc` branch".into()));
                }
                let (binder, _) = self.ident()?;
                self.expect(&Tok::FatArrow)?;
                suc = Some((binder, self.term()?));
            } else {
                return Err(self.unexpected());
            }
        }
        let (zero, (suc_binder, suc_branch)) = match (zero, suc) {
            (Some(z), Some(s)) => (z, s),
            // two arms of which neither repeats means both are present
            _ => unreachable!(),
        };
        Ok(Term::new(
            TermKind::Match {
                scrutinee: Box::new(scrutinee),
                zero_branch: Box::new(zero),
                suc_binder,
                suc_branch: Box::new(suc_branch),
            },
            self.since(start),
        ))
    }

    fn implies(&mut self) -> PResult<Term> {
        self.nested(|p| {
            let lhs = p.or()?;
            if p.eat(&Tok::FatArrow) {
                let rhs = p.implies()?;
                let span = lhs.span.to(rhs.span);
                Ok(Term::new(
                    TermKind::Logic(LogicOp::Implies, Box::new(lhs), Box::new(rhs)),
                    span,
                ))
            } else {
                Ok(lhs)
            }
        })
    }

    fn or(&mut self) -> PResult<Term> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.and()?;
            let span = lhs.span.to(rhs.span);
            lhs = Term::new(
                TermKind::Logic(LogicOp::Or, Box::new(lhs), Box::new(rhs)),
                span,
            );
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Term> {
        let mut lhs = self.not()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.not()?;
            let span = lhs.span.to(rhs.span);
            lhs = Term::new(
                TermKind::Logic(LogicOp::And, Box::new(lhs), Box::new(rhs)),
                span,
            );
        }
        Ok(lhs)
    }

    fn not(&mut self) -> PResult<Term> {
        if self.at(&Tok::Bang) {
            let start = self.bump().span.start;
            let inner = self.nested(|p| p.not())?;
            return Ok(Term::new(
                TermKind::Not(Box::new(inner)),
                self.since(start),
            ));
        }
        self.cmp()
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::EqEq => CmpOp::Eq,
            Tok::NotEq => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => {
                for t in [Tok::EqEq, Tok::NotEq, Tok::Lt, Tok::Le, Tok::Gt, Tok::Ge] {
                    self.expected.insert(t.describe());
                }
                return None;
            }
        };
        self.bump();
        Some(op)
    }

    fn cmp(&mut self) -> PResult<Term> {
        let lhs = self.arith()?;
        if let Some(op) = self.cmp_op() {
            let rhs = self.arith()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Term::new(
                TermKind::Cmp(op, Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn arith(&mut self) -> PResult<Term> {
        let mut lhs = self.mul()?;
        loop {
            let op = if self.eat(&Tok::Plus) {
                ArithOp::Add
            } else if self.eat(&Tok::Minus) {
                ArithOp::Sub
            } else {
                break;
            };
            let rhs = self.mul()?;
            let span = lhs.span.to(rhs.span);
            lhs = Term::new(TermKind::Arith(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn mul(&mut self) -> PResult<Term> {
        let mut lhs = self.unary()?;
        while self.at(&Tok::Star) {
            let star = self.bump().span;
            let rhs = self.unary()?;
            let span = lhs.span.to(rhs.span);
            lhs = match (literal(&lhs), literal(&rhs)) {
                (Some(k), _) => Term::new(TermKind::Scale(k, Box::new(rhs)), span),
                (None, Some(k)) => Term::new(TermKind::Scale(k, Box::new(lhs)), span),
                (None, None) => {
                    return Err(self.error_at(
                        star,
                        "multiplication needs an integer literal on one side".into(),
                    ))
                }
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.at(&Tok::Minus) {
            let minus = self.bump().span;
            if let Tok::Int(n) = *self.peek() {
                let end = self.bump().span;
                return Ok(Term::new(TermKind::IntLit(-n), minus.to(end)));
            }
            let inner = self.nested(|p| p.unary())?;
            let span = minus.to(inner.span);
            return Ok(Term::new(
                TermKind::Arith(
                    ArithOp::Sub,
                    Box::new(Term::new(TermKind::NatLit(0), minus)),
                    Box::new(inner),
                ),
                span,
            ));
        }
        self.app()
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Int(_) | Tok::True | Tok::False | Tok::Zero | Tok::LParen
        )
    }

    fn app(&mut self) -> PResult<Term> {
        if self.at(&Tok::Suc) {
            let kw = self.bump().span;
            let arg = self.atom()?;
            let span = kw.to(arg.span);
            return Ok(Term::new(
                TermKind::Arith(
                    ArithOp::Add,
                    Box::new(arg),
                    Box::new(Term::new(TermKind::NatLit(1), kw)),
                ),
                span,
            ));
        }
        let mut head = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            let span = head.span.to(arg.span);
            head = Term::new(TermKind::App(Box::new(head), Box::new(arg)), span);
        }
        Ok(head)
    }

    fn atom(&mut self) -> PResult<Term> {
        let start = self.span().start;
        let kind = match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                TermKind::Var(name)
            }
            Tok::Int(n) => {
                self.bump();
                TermKind::NatLit(n)
            }
            Tok::True => {
                self.bump();
                TermKind::BoolLit(true)
            }
            Tok::False => {
                self.bump();
                TermKind::BoolLit(false)
            }
            Tok::Zero => {
                self.bump();
                TermKind::NatLit(0)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                if self.eat(&Tok::Comma) {
                    if !self.at(&Tok::Auto) {
                        return Err(self.error_at(
                            self.span(),
                            format!(
                                "the proof component of a pair must be `auto`, found {}",
                                self.peek().describe()
                            ),
                        ));
                    }
                    self.bump();
                    self.expect(&Tok::RParen)?;
                    TermKind::Pair {
                        value: Box::new(inner),
                        proof: Proof::Auto,
                    }
                } else if self.eat(&Tok::Colon) {
                    let ty = self.ty()?;
                    self.expect(&Tok::RParen)?;
                    TermKind::Annot(Box::new(inner), ty)
                } else {
                    self.expect(&Tok::RParen)?;
                    return Ok(inner);
                }
            }
            Tok::Auto => {
                return Err(self.error_at(
                    self.span(),
                    "`auto` may only appear as the proof component of a pair".into(),
                ))
            }
            _ => {
                for t in ["identifier", "integer", "`(`", "`true`", "`false`", "`zero`"] {
                    self.expected.insert(t.into());
                }
                return Err(self.unexpected());
            }
        };
        Ok(Term::new(kind, self.since(start)))
    }
}

fn literal(t: &Term) -> Option<i64> {
    match t.kind {
        TermKind::NatLit(k) | TermKind::IntLit(k) => Some(k),
        _ => None,
    }
}
