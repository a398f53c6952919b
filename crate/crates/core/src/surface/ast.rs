//! Surface syntax tree for `.rfn` programs.
//!
//! Every node carries the byte span it was parsed from. Structural comparison
//! that ignores spans goes through [`SurfaceProgram::without_spans`].

use crate::span::Span;
use crate::typesys::BaseType;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurfaceProgram {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Alias(AliasDef),
    Fun(FunDef),
    Val(ValDef),
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Alias(a) => &a.name,
            Item::Fun(f) => &f.name,
            Item::Val(v) => &v.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Item::Alias(a) => a.span,
            Item::Fun(f) => f.span,
            Item::Val(v) => v.span,
        }
    }
}

/// `type Name(param) = type`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliasDef {
    pub name: String,
    pub param: Option<String>,
    pub body: SurfaceType,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: SurfaceType,
    pub span: Span,
}

/// `fun f (a : T) ... : R = body`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunDef {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: SurfaceType,
    pub body: Term,
    pub span: Span,
}

/// `val x : T = body`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValDef {
    pub name: String,
    pub ty: SurfaceType,
    pub body: Term,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceType {
    pub kind: TypeKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeKind {
    /// Unrefined `Nat`, `Int` or `Bool`.
    Base(BaseType),
    /// `{binder: base | pred}`
    Refined {
        binder: String,
        base: BaseType,
        pred: Box<Term>,
    },
    /// `(param : domain) -> codomain`, or `domain -> codomain` when `param` is `None`.
    Fun {
        param: Option<String>,
        domain: Box<SurfaceType>,
        codomain: Box<SurfaceType>,
    },
    /// `Name` or `Name(arg)`; removed by alias expansion.
    Alias { name: String, arg: Option<Box<Term>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
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
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogicOp {
    And,
    Or,
    Implies,
}

impl LogicOp {
    pub fn symbol(self) -> &'static str {
        match self {
            LogicOp::And => "&&",
            LogicOp::Or => "||",
            LogicOp::Implies => "=>",
        }
    }
}

/// Proof component of a refinement pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Proof {
    /// Discharged by the solver.
    Auto,
    /// Placeholder left behind by erasure.
    Erased,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermKind {
    Var(String),
    NatLit(i64),
    /// Negative integer literal.
    IntLit(i64),
    BoolLit(bool),
    Arith(ArithOp, Box<Term>, Box<Term>),
    /// Multiplication by a literal coefficient.
    Scale(i64, Box<Term>),
    Cmp(CmpOp, Box<Term>, Box<Term>),
    Not(Box<Term>),
    Logic(LogicOp, Box<Term>, Box<Term>),
    App(Box<Term>, Box<Term>),
    Lam {
        param: String,
        annotation: Option<SurfaceType>,
        body: Box<Term>,
    },
    Let {
        name: String,
        bound: Box<Term>,
        body: Box<Term>,
    },
    If {
        cond: Box<Term>,
        then_branch: Box<Term>,
        else_branch: Box<Term>,
    },
    Match {
        scrutinee: Box<Term>,
        zero_branch: Box<Term>,
        suc_binder: String,
        suc_branch: Box<Term>,
    },
    Pair {
        value: Box<Term>,
        proof: Proof,
    },
    Annot(Box<Term>, SurfaceType),
}

impl Term {
    pub fn new(kind: TermKind, span: Span) -> Self {
        Term { kind, span }
    }

    /// Direct subterms, left to right.
    pub fn children(&self) -> Vec<&Term> {
        use TermKind::*;
        match &self.kind {
            Var(_) | NatLit(_) | IntLit(_) | BoolLit(_) => vec![],
            Arith(_, a, b) | Cmp(_, a, b) | Logic(_, a, b) | App(a, b) => vec![a, b],
            Scale(_, e) | Not(e) => vec![e],
            Lam { body, .. } => vec![body],
            Let { bound, body, .. } => vec![bound, body],
            If {
                cond,
                then_branch,
                else_branch,
            } => vec![cond, then_branch, else_branch],
            Match {
                scrutinee,
                zero_branch,
                suc_branch,
                ..
            } => vec![scrutinee, zero_branch, suc_branch],
            Pair { value, .. } => vec![value],
            Annot(e, _) => vec![e],
        }
    }

    fn clear_spans(&mut self) {
        self.span = Span::DUMMY;
        use TermKind::*;
        match &mut self.kind {
            Var(_) | NatLit(_) | IntLit(_) | BoolLit(_) => {}
            Arith(_, a, b) | Cmp(_, a, b) | Logic(_, a, b) | App(a, b) => {
                a.clear_spans();
                b.clear_spans();
            }
            Scale(_, e) | Not(e) => e.clear_spans(),
            Lam {
                annotation, body, ..
            } => {
                if let Some(t) = annotation {
                    t.clear_spans();
                }
                body.clear_spans();
            }
            Let { bound, body, .. } => {
                bound.clear_spans();
                body.clear_spans();
            }
            If {
                cond,
                then_branch,
                else_branch,
            } => {
                cond.clear_spans();
                then_branch.clear_spans();
                else_branch.clear_spans();
            }
            Match {
                scrutinee,
                zero_branch,
                suc_branch,
                ..
            } => {
                scrutinee.clear_spans();
                zero_branch.clear_spans();
                suc_branch.clear_spans();
            }
            Pair { value, .. } => value.clear_spans(),
            Annot(e, t) => {
                e.clear_spans();
                t.clear_spans();
            }
        }
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        use TermKind::*;
        match &self.kind {
            Var(x) => {
                if !bound.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Lam {
                param,
                annotation,
                body,
            } => {
                if let Some(t) = annotation {
                    t.collect_free(bound, out);
                }
                bound.push(param.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Let { name, bound: e, body } => {
                e.collect_free(bound, out);
                bound.push(name.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Match {
                scrutinee,
                zero_branch,
                suc_binder,
                suc_branch,
            } => {
                scrutinee.collect_free(bound, out);
                zero_branch.collect_free(bound, out);
                bound.push(suc_binder.clone());
                suc_branch.collect_free(bound, out);
                bound.pop();
            }
            Annot(e, t) => {
                e.collect_free(bound, out);
                t.collect_free(bound, out);
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }
}

impl SurfaceType {
    pub fn new(kind: TypeKind, span: Span) -> Self {
        SurfaceType { kind, span }
    }

    fn clear_spans(&mut self) {
        self.span = Span::DUMMY;
        match &mut self.kind {
            TypeKind::Base(_) => {}
            TypeKind::Refined { pred, .. } => pred.clear_spans(),
            TypeKind::Fun {
                domain, codomain, ..
            } => {
                domain.clear_spans();
                codomain.clear_spans();
            }
            TypeKind::Alias { arg, .. } => {
                if let Some(a) = arg {
                    a.clear_spans();
                }
            }
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match &self.kind {
            TypeKind::Base(_) => {}
            TypeKind::Refined { binder, pred, .. } => {
                bound.push(binder.clone());
                pred.collect_free(bound, out);
                bound.pop();
            }
            TypeKind::Fun {
                param,
                domain,
                codomain,
            } => {
                domain.collect_free(bound, out);
                if let Some(p) = param {
                    bound.push(p.clone());
                }
                codomain.collect_free(bound, out);
                if param.is_some() {
                    bound.pop();
                }
            }
            TypeKind::Alias { arg, .. } => {
                if let Some(a) = arg {
                    a.collect_free(bound, out);
                }
            }
        }
    }

    /// True when some alias reference remains anywhere inside, including
    /// annotations nested in refinement predicates.
    pub fn mentions_alias(&self) -> bool {
        match &self.kind {
            TypeKind::Base(_) => false,
            TypeKind::Refined { pred, .. } => pred.mentions_alias(),
            TypeKind::Fun {
                domain, codomain, ..
            } => domain.mentions_alias() || codomain.mentions_alias(),
            TypeKind::Alias { .. } => true,
        }
    }
}

impl Term {
    pub fn mentions_alias(&self) -> bool {
        match &self.kind {
            TermKind::Lam {
                annotation: Some(t),
                body,
                ..
            } => t.mentions_alias() || body.mentions_alias(),
            TermKind::Annot(e, t) => t.mentions_alias() || e.mentions_alias(),
            _ => self.children().into_iter().any(Term::mentions_alias),
        }
    }
}

impl Item {
    fn clear_spans(&mut self) {
        match self {
            Item::Alias(a) => {
                a.span = Span::DUMMY;
                a.body.clear_spans();
            }
            Item::Fun(f) => {
                f.span = Span::DUMMY;
                for p in &mut f.params {
                    p.span = Span::DUMMY;
                    p.ty.clear_spans();
                }
                f.ret.clear_spans();
                f.body.clear_spans();
            }
            Item::Val(v) => {
                v.span = Span::DUMMY;
                v.ty.clear_spans();
                v.body.clear_spans();
            }
        }
    }
}

impl SurfaceProgram {
    /// Copy with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> SurfaceProgram {
        let mut p = self.clone();
        for item in &mut p.items {
            item.clear_spans();
        }
        p
    }

    pub fn find(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.name() == name)
    }
}
