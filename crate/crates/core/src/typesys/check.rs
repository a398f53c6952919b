use std::collections::{HashMap, HashSet};

use crate::logic::{self, LinearTerm, Operand, Overflow, Predicate, Sort};
use crate::span::Span;
use crate::surface::print::excerpt;
use crate::surface::{ArithOp, Item, LogicOp, SurfaceProgram, SurfaceType, Term, TermKind, TypeKind};

use super::context::TypingContext;
use super::error::TypeError;
use super::types::{base_name, BaseType, RefinedType};
use super::vc::{Origin, VerificationCondition};

type TResult<T> = Result<T, TypeError>;

const EXCERPT: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Base(BaseType),
    Fun,
}

impl Kind {
    fn of(t: &RefinedType) -> Kind {
        t.base_type().map_or(Kind::Fun, Kind::Base)
    }
}

#[derive(Clone, Debug)]
struct ScopeEntry {
    surface: String,
    internal: String,
    kind: Kind,
}

#[derive(Clone, Copy)]
struct Mark {
    ctx: usize,
    scope: usize,
}

/// Result of checking a whole program. VCs of items that failed to check
/// are dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProgramCheck {
    pub vcs: Vec<VerificationCondition>,
    pub errors: Vec<TypeError>,
}

impl ProgramCheck {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Bidirectional checker state: surface-to-internal name scope, the set of
/// internal names already handed out, and the VCs emitted so far.
#[derive(Debug, Default)]
pub struct Checker {
    scope: Vec<ScopeEntry>,
    used: HashSet<String>,
    counters: HashMap<String, u64>,
    vcs: Vec<VerificationCondition>,
    item: Option<String>,
}

fn ovf(span: Span) -> impl Fn(Overflow) -> TypeError {
    move |_| TypeError::Overflow { span }
}

fn mismatch(span: Span, expected: impl ToString, found: impl ToString) -> TypeError {
    TypeError::TypeMismatch {
        span,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn sort_error(span: Span, expected: impl ToString, found: impl ToString) -> TypeError {
    TypeError::SortError {
        span,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn var_operand(name: &str, base: BaseType) -> Operand {
    Operand::var(name, base == BaseType::Bool)
}

fn nonneg(name: &str) -> Predicate {
    Predicate::cmp(
        logic::CmpOp::Ge,
        LinearTerm::var(name),
        LinearTerm::constant(0),
    )
}

/// `{v: base | v == op}` with `v` chosen clear of the operand.
fn selfify(base: BaseType, op: &Operand) -> RefinedType {
    let fv = op.free_vars();
    let binder = pick_binder(&fv);
    let pred = match op {
        Operand::Int(t) => Predicate::cmp(logic::CmpOp::Eq, LinearTerm::var(&binder), t.clone()),
        Operand::Bool(p) => Predicate::iff(Predicate::Var(binder.clone()), p.clone()),
    };
    RefinedType::refined(base, binder, pred)
}

fn pick_binder(avoid: &[String]) -> String {
    if !avoid.iter().any(|x| x == "v") {
        return "v".into();
    }
    (1..)
        .map(|k| format!("v!{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded search")
}

fn numeric_compatible(a: BaseType, b: BaseType) -> bool {
    a.sort() == b.sort()
}

fn describe_kind(k: Kind) -> String {
    match k {
        Kind::Base(b) => b.to_string(),
        Kind::Fun => "a function".into(),
    }
}

impl Checker {
    pub fn new() -> Self {
        Self::default()
    }

    /// A checker whose scope exposes every binding of `ctx` under its own name.
    pub fn for_context(ctx: &TypingContext) -> Self {
        let mut c = Checker::new();
        for (name, ty) in ctx.bindings() {
            c.used.insert(name.to_string());
            c.scope.push(ScopeEntry {
                surface: name.to_string(),
                internal: name.to_string(),
                kind: Kind::of(ty),
            });
        }
        c
    }

    pub fn take_vcs(&mut self) -> Vec<VerificationCondition> {
        std::mem::take(&mut self.vcs)
    }

    /// `hint` itself if unused, otherwise `hint!k` for the least unused `k`.
    fn fresh(&mut self, hint: &str) -> String {
        let base = base_name(hint);
        let base = if base.is_empty() { "v" } else { base };
        if self.used.insert(base.to_string()) {
            return base.to_string();
        }
        let k = self.counters.entry(base.to_string()).or_insert(0);
        loop {
            *k += 1;
            let cand = format!("{base}!{k}");
            if self.used.insert(cand.clone()) {
                return cand;
            }
        }
    }

    fn reserve(&mut self, names: impl IntoIterator<Item = String>) {
        self.used.extend(names);
    }

    fn mark(&self, ctx: &TypingContext) -> Mark {
        Mark {
            ctx: ctx.len(),
            scope: self.scope.len(),
        }
    }

    fn restore(&mut self, ctx: &mut TypingContext, m: Mark) {
        ctx.truncate(m.ctx);
        self.scope.truncate(m.scope);
    }

    fn push_scope(&mut self, surface: &str, internal: &str, kind: Kind) {
        self.scope.push(ScopeEntry {
            surface: surface.to_string(),
            internal: internal.to_string(),
            kind,
        });
    }

    fn lookup(&self, surface: &str) -> Option<&ScopeEntry> {
        self.scope.iter().rev().find(|e| e.surface == surface)
    }

    fn origin(&self, span: Span, what: String) -> Origin {
        let reason = match &self.item {
            Some(item) => format!("in `{item}`: {what}"),
            None => what,
        };
        Origin { span, reason }
    }

    fn emit(
        &mut self,
        ctx: &TypingContext,
        extra: Option<(String, BaseType, Predicate)>,
        goal: Predicate,
        origin: &Origin,
    ) {
        if goal.is_true() {
            return;
        }
        let (mut declarations, mut facts) = ctx.hypotheses();
        if let Some((name, base, fact)) = extra {
            declarations.push((name, base));
            if !fact.is_true() {
                facts.push(fact);
            }
        }
        self.vcs.push(VerificationCondition {
            declarations,
            facts,
            goal,
            origin: origin.clone(),
        });
    }

    // ---- types ----

    /// Elaborates an alias-free surface type in the current scope.
    fn elab_type(&mut self, t: &SurfaceType) -> TResult<RefinedType> {
        match &t.kind {
            TypeKind::Base(b) => Ok(RefinedType::base(*b)),
            TypeKind::Refined { binder, base, pred } => {
                let len = self.scope.len();
                self.push_scope(binder, binder, Kind::Base(*base));
                let p = self.elab_pred(pred);
                self.scope.truncate(len);
                Ok(RefinedType::refined(*base, binder.clone(), p?))
            }
            TypeKind::Fun {
                param,
                domain,
                codomain,
            } => {
                let d = self.elab_type(domain)?;
                let p = param.clone().unwrap_or_else(|| "_".into());
                let len = self.scope.len();
                self.push_scope(&p, &p, Kind::of(&d));
                let c = self.elab_type(codomain);
                self.scope.truncate(len);
                Ok(RefinedType::fun(p, d, c?))
            }
            TypeKind::Alias { name, .. } => Err(TypeError::UnexpandedAlias {
                name: name.clone(),
                span: t.span,
            }),
        }
    }

    fn elab_pred(&mut self, e: &Term) -> TResult<Predicate> {
        match self.embed(None, e)? {
            (Operand::Bool(p), _) => Ok(p),
            (Operand::Int(_), b) => Err(sort_error(e.span, "Bool", b)),
        }
    }

    // ---- embedding of terms into the logic ----

    /// Translates a first-order term into the logic. With a context the term
    /// is a program term, and subterms outside the logic are synthesized and
    /// bound to witness names. Without one it is a refinement predicate.
    fn embed(
        &mut self,
        mut ctx: Option<&mut TypingContext>,
        e: &Term,
    ) -> TResult<(Operand, BaseType)> {
        let pred_mode = ctx.is_none();
        let wrong = |span: Span, expected: &str, found: String| {
            if pred_mode {
                sort_error(span, expected, found)
            } else {
                mismatch(span, expected, found)
            }
        };
        match &e.kind {
            TermKind::Var(x) => match self.lookup(x) {
                Some(ScopeEntry {
                    internal,
                    kind: Kind::Base(b),
                    ..
                }) => Ok((var_operand(internal, *b), *b)),
                Some(ScopeEntry {
                    kind: Kind::Fun, ..
                }) => Err(wrong(e.span, "a Nat, Int or Bool value", format!("function `{x}`"))),
                None if pred_mode => Err(sort_error(
                    e.span,
                    "a variable in scope",
                    format!("unbound variable `{x}`"),
                )),
                None => Err(TypeError::UnboundVariable {
                    name: x.clone(),
                    span: e.span,
                }),
            },
            TermKind::NatLit(k) => Ok((Operand::Int(LinearTerm::constant(*k)), BaseType::Nat)),
            TermKind::IntLit(k) => Ok((Operand::Int(LinearTerm::constant(*k)), BaseType::Int)),
            TermKind::BoolLit(b) => Ok((Operand::Bool(Predicate::Const(*b)), BaseType::Bool)),
            TermKind::Arith(op, a, b) => {
                let (la, ba) = self.embed_int(ctx.as_deref_mut(), a)?;
                let (lb, bb) = self.embed_int(ctx.as_deref_mut(), b)?;
                let (t, base) = match op {
                    ArithOp::Add => {
                        let base = if ba == BaseType::Nat && bb == BaseType::Nat {
                            BaseType::Nat
                        } else {
                            BaseType::Int
                        };
                        (la.add(&lb), base)
                    }
                    ArithOp::Sub => (la.sub(&lb), BaseType::Int),
                };
                Ok((Operand::Int(t.map_err(ovf(e.span))?), base))
            }
            TermKind::Scale(k, a) => {
                let (la, ba) = self.embed_int(ctx, a)?;
                let base = if ba == BaseType::Nat && *k >= 0 {
                    BaseType::Nat
                } else {
                    BaseType::Int
                };
                Ok((Operand::Int(la.scale(*k).map_err(ovf(e.span))?), base))
            }
            TermKind::Cmp(op, a, b) => {
                let (oa, ba) = self.embed(ctx.as_deref_mut(), a)?;
                let (ob, bb) = self.embed(ctx, b)?;
                let p = match (oa, ob) {
                    (Operand::Int(x), Operand::Int(y)) => Predicate::cmp((*op).into(), x, y),
                    (Operand::Bool(x), Operand::Bool(y)) => match op {
                        crate::surface::CmpOp::Eq => Predicate::iff(x, y),
                        crate::surface::CmpOp::Ne => Predicate::not(Predicate::iff(x, y)),
                        _ => return Err(wrong(e.span, "Int or Nat operands", "Bool".into())),
                    },
                    _ => {
                        return Err(wrong(
                            b.span,
                            &ba.to_string(),
                            bb.to_string(),
                        ))
                    }
                };
                Ok((Operand::Bool(p), BaseType::Bool))
            }
            TermKind::Not(a) => {
                let p = self.embed_bool(ctx, a)?;
                Ok((Operand::Bool(Predicate::not(p)), BaseType::Bool))
            }
            TermKind::Logic(op, a, b) => {
                let pa = self.embed_bool(ctx.as_deref_mut(), a)?;
                let pb = self.embed_bool(ctx, b)?;
                let p = match op {
                    LogicOp::And => Predicate::And(vec![pa, pb]),
                    LogicOp::Or => Predicate::Or(vec![pa, pb]),
                    LogicOp::Implies => Predicate::implies(pa, pb),
                };
                Ok((Operand::Bool(p), BaseType::Bool))
            }
            TermKind::Pair { value, .. } if !pred_mode => self.embed(ctx, value),
            _ => {
                let Some(ctx) = ctx else {
                    return Err(sort_error(
                        e.span,
                        "a linear arithmetic predicate",
                        format!("`{}`", excerpt(e, EXCERPT)),
                    ));
                };
                let t = self.synth_inner(ctx, e)?;
                match t.base_type() {
                    Some(b) => {
                        let w = self.fresh("v");
                        ctx.bind(&w, t);
                        Ok((var_operand(&w, b), b))
                    }
                    None => Err(mismatch(e.span, "a Nat, Int or Bool value", t)),
                }
            }
        }
    }

    fn embed_int(
        &mut self,
        ctx: Option<&mut TypingContext>,
        e: &Term,
    ) -> TResult<(LinearTerm, BaseType)> {
        let pred_mode = ctx.is_none();
        match self.embed(ctx, e)? {
            (Operand::Int(t), b) => Ok((t, b)),
            (Operand::Bool(_), _) if pred_mode => Err(sort_error(e.span, "Int", "Bool")),
            (Operand::Bool(_), _) => Err(mismatch(e.span, "Nat or Int", "Bool")),
        }
    }

    fn embed_bool(&mut self, ctx: Option<&mut TypingContext>, e: &Term) -> TResult<Predicate> {
        let pred_mode = ctx.is_none();
        match self.embed(ctx, e)? {
            (Operand::Bool(p), _) => Ok(p),
            (Operand::Int(_), b) if pred_mode => Err(sort_error(e.span, "Bool", b)),
            (Operand::Int(_), b) => Err(mismatch(e.span, "Bool", b)),
        }
    }

    fn nat_scrutinee(&mut self, ctx: &mut TypingContext, e: &Term) -> TResult<LinearTerm> {
        match self.embed(Some(ctx), e)? {
            (Operand::Int(t), BaseType::Nat) => Ok(t),
            (_, b) => Err(mismatch(e.span, "Nat", b)),
        }
    }

    // ---- subtyping ----

    fn subtype_at(
        &mut self,
        ctx: &mut TypingContext,
        s: &RefinedType,
        t: &RefinedType,
        origin: &Origin,
    ) -> TResult<()> {
        match (s, t) {
            (
                RefinedType::Base {
                    base: b1,
                    binder: x1,
                    pred: p,
                },
                RefinedType::Base {
                    base: b2,
                    binder: x2,
                    pred: q,
                },
            ) => {
                if !numeric_compatible(*b1, *b2) {
                    return Err(mismatch(origin.span, t, s));
                }
                self.reserve(s.free_vars());
                self.reserve(t.free_vars());
                let y = self.fresh(x1);
                let op = var_operand(&y, *b1);
                let fact = p.subst(x1, &op).map_err(ovf(origin.span))?;
                let mut goal = q.subst(x2, &op).map_err(ovf(origin.span))?;
                if *b1 == BaseType::Int && *b2 == BaseType::Nat {
                    goal = Predicate::and([goal, nonneg(&y)]);
                }
                self.emit(ctx, Some((y, *b1, fact)), goal, origin);
                Ok(())
            }
            (
                RefinedType::Fun {
                    param: p1,
                    domain: d1,
                    codomain: c1,
                },
                RefinedType::Fun {
                    param: p2,
                    domain: d2,
                    codomain: c2,
                },
            ) => {
                self.subtype_at(ctx, d2, d1, origin)?;
                let m = self.mark(ctx);
                self.reserve(s.free_vars());
                self.reserve(t.free_vars());
                let z = self.fresh(p2);
                ctx.bind(&z, (**d2).clone());
                let r = (|| {
                    let c1 = self.instantiate(c1, p1, &z, d2, origin.span)?;
                    let c2 = self.instantiate(c2, p2, &z, d2, origin.span)?;
                    self.subtype_at(ctx, &c1, &c2, origin)
                })();
                self.restore(ctx, m);
                r
            }
            _ => Err(mismatch(origin.span, t, s)),
        }
    }

    /// `codomain[param := name]` for a parameter of type `domain`.
    fn instantiate(
        &self,
        codomain: &RefinedType,
        param: &str,
        name: &str,
        domain: &RefinedType,
        span: Span,
    ) -> TResult<RefinedType> {
        match domain.base_type() {
            Some(b) => codomain
                .subst(param, &var_operand(name, b))
                .map_err(ovf(span)),
            None => Ok(codomain.rename(param, name)),
        }
    }

    /// Checks a value already embedded as `op` against a base type. Variables
    /// are substituted directly into the refinement.
    fn check_operand(
        &mut self,
        ctx: &mut TypingContext,
        e: &Term,
        op: &Operand,
        base: BaseType,
        t: &RefinedType,
    ) -> TResult<()> {
        let origin = self.origin(
            e.span,
            format!("`{}` against {t}", excerpt(e, EXCERPT)),
        );
        let RefinedType::Base {
            base: tb,
            binder,
            pred,
        } = t
        else {
            return Err(mismatch(e.span, t, base));
        };
        let direct = match op {
            Operand::Int(l) => l.as_var().is_some(),
            Operand::Bool(Predicate::Var(_)) => true,
            Operand::Bool(_) => false,
        };
        if !direct {
            return self.subtype_at(ctx, &selfify(base, op), t, &origin);
        }
        if !numeric_compatible(base, *tb) {
            return Err(mismatch(e.span, t, base));
        }
        let mut goal = pred.subst(binder, op).map_err(ovf(e.span))?;
        if base == BaseType::Int && *tb == BaseType::Nat {
            let Operand::Int(l) = op else { unreachable!() };
            goal = Predicate::and([goal, nonneg(l.as_var().expect("variable"))]);
        }
        self.emit(ctx, None, goal, &origin);
        Ok(())
    }

    // ---- checking ----

    /// Checks `e` against `t`. Bindings introduced on the way are discarded.
    pub fn check_term(
        &mut self,
        ctx: &mut TypingContext,
        e: &Term,
        t: &RefinedType,
    ) -> TResult<()> {
        let m = self.mark(ctx);
        let r = self.check_inner(ctx, e, t);
        self.restore(ctx, m);
        r
    }

    fn check_inner(&mut self, ctx: &mut TypingContext, e: &Term, t: &RefinedType) -> TResult<()> {
        match (&e.kind, t) {
            (
                TermKind::Lam {
                    param,
                    annotation,
                    body,
                },
                RefinedType::Fun {
                    param: p,
                    domain,
                    codomain,
                },
            ) => {
                if let Some(ann) = annotation {
                    let a = self.elab_type(ann)?;
                    let origin = self.origin(
                        ann.span,
                        format!("parameter `{param}`: {domain} against {a}"),
                    );
                    self.subtype_at(ctx, domain, &a, &origin)?;
                }
                let x = self.fresh(param);
                ctx.bind(&x, (**domain).clone());
                self.push_scope(param, &x, Kind::of(domain));
                let cod = self.instantiate(codomain, p, &x, domain, e.span)?;
                self.check_inner(ctx, body, &cod)
            }
            (TermKind::Lam { .. }, _) => Err(mismatch(e.span, t, "a function")),
            (TermKind::Let { name, bound, body }, _) => {
                let t1 = self.synth_inner(ctx, bound)?;
                let x = self.fresh(name);
                let kind = Kind::of(&t1);
                ctx.bind(&x, t1);
                self.push_scope(name, &x, kind);
                self.check_inner(ctx, body, t)
            }
            (
                TermKind::If {
                    cond,
                    then_branch,
                    else_branch,
                },
                _,
            ) => {
                let c = self.embed_bool(Some(ctx), cond)?;
                let m = self.mark(ctx);
                ctx.assume(c.clone());
                self.check_inner(ctx, then_branch, t)?;
                self.restore(ctx, m);
                ctx.assume(Predicate::not(c));
                self.check_inner(ctx, else_branch, t)
            }
            (
                TermKind::Match {
                    scrutinee,
                    zero_branch,
                    suc_binder,
                    suc_branch,
                },
                _,
            ) => {
                let s = self.nat_scrutinee(ctx, scrutinee)?;
                let m = self.mark(ctx);
                ctx.assume(is_zero(&s));
                self.check_inner(ctx, zero_branch, t)?;
                self.restore(ctx, m);
                let k = self.fresh(suc_binder);
                ctx.bind(&k, RefinedType::base(BaseType::Nat));
                self.push_scope(suc_binder, &k, Kind::Base(BaseType::Nat));
                ctx.assume(is_successor(&s, &k, e.span)?);
                self.check_inner(ctx, suc_branch, t)
            }
            (TermKind::Pair { value, .. }, RefinedType::Base { .. }) => {
                self.check_inner(ctx, value, t)
            }
            (TermKind::Pair { .. }, _) => Err(mismatch(e.span, t, "a refinement pair")),
            (TermKind::Annot(inner, st), _) => {
                let a = self.elab_type(st)?;
                self.check_term(ctx, inner, &a)?;
                let origin = self.origin(e.span, format!("{a} against {t}"));
                self.subtype_at(ctx, &a, t, &origin)
            }
            (TermKind::Var(x), RefinedType::Base { .. }) => match self.lookup(x).cloned() {
                Some(ScopeEntry {
                    internal,
                    kind: Kind::Base(b),
                    ..
                }) => self.check_operand(ctx, e, &var_operand(&internal, b), b, t),
                Some(entry) => Err(mismatch(e.span, t, describe_kind(entry.kind))),
                None => Err(TypeError::UnboundVariable {
                    name: x.clone(),
                    span: e.span,
                }),
            },
            _ => {
                let s = self.synth_inner(ctx, e)?;
                let origin = self.origin(
                    e.span,
                    format!("`{}` against {t}", excerpt(e, EXCERPT)),
                );
                self.subtype_at(ctx, &s, t, &origin)
            }
        }
    }

    // ---- synthesis ----

    /// Synthesizes a type for `e`. Witness bindings the type depends on are
    /// left in `ctx`.
    pub fn synth_term(&mut self, ctx: &mut TypingContext, e: &Term) -> TResult<RefinedType> {
        let scope = self.scope.len();
        let r = self.synth_inner(ctx, e);
        self.scope.truncate(scope);
        r
    }

    fn synth_inner(&mut self, ctx: &mut TypingContext, e: &Term) -> TResult<RefinedType> {
        match &e.kind {
            TermKind::Var(x) => {
                let Some(entry) = self.lookup(x).cloned() else {
                    return Err(TypeError::UnboundVariable {
                        name: x.clone(),
                        span: e.span,
                    });
                };
                match entry.kind {
                    Kind::Base(b) => Ok(selfify(b, &var_operand(&entry.internal, b))),
                    Kind::Fun => ctx.lookup(&entry.internal).cloned().ok_or_else(|| {
                        TypeError::UnboundVariable {
                            name: x.clone(),
                            span: e.span,
                        }
                    }),
                }
            }
            TermKind::NatLit(_)
            | TermKind::IntLit(_)
            | TermKind::BoolLit(_)
            | TermKind::Arith(..)
            | TermKind::Scale(..)
            | TermKind::Cmp(..)
            | TermKind::Not(_)
            | TermKind::Logic(..) => {
                let (op, b) = self.embed(Some(ctx), e)?;
                Ok(selfify(b, &op))
            }
            TermKind::App(f, a) => {
                let tf = self.synth_inner(ctx, f)?;
                let RefinedType::Fun {
                    param,
                    domain,
                    codomain,
                } = tf
                else {
                    return Err(mismatch(f.span, "a function", tf));
                };
                match domain.base_type() {
                    None => {
                        self.check_term(ctx, a, &domain)?;
                        Ok(*codomain)
                    }
                    Some(_) => {
                        let (op, b) = self.embed(Some(ctx), a)?;
                        self.check_operand(ctx, a, &op, b, &domain)?;
                        codomain.subst(&param, &op).map_err(ovf(e.span))
                    }
                }
            }
            TermKind::Lam {
                param,
                annotation: Some(ann),
                body,
            } => {
                let d = self.elab_type(ann)?;
                let m = self.mark(ctx);
                let x = self.fresh(param);
                ctx.bind(&x, d.clone());
                self.push_scope(param, &x, Kind::of(&d));
                let r = self.synth_inner(ctx, body);
                self.restore(ctx, m);
                let tb = r?;
                let allowed: HashSet<&str> = ctx.names().chain([x.as_str()]).collect();
                let tb = tb.weaken_to(&|n| allowed.contains(n));
                Ok(RefinedType::fun(x, d, tb))
            }
            TermKind::Lam {
                annotation: None, ..
            } => Err(TypeError::CannotSynthesize {
                what: "an unannotated function".into(),
                span: e.span,
            }),
            TermKind::Let { name, bound, body } => {
                let t1 = self.synth_inner(ctx, bound)?;
                let x = self.fresh(name);
                let kind = Kind::of(&t1);
                ctx.bind(&x, t1);
                let scope = self.scope.len();
                self.push_scope(name, &x, kind);
                let r = self.synth_inner(ctx, body);
                self.scope.truncate(scope);
                r
            }
            TermKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let c = self.embed_bool(Some(ctx), cond)?;
                let t1 = self.synth_branch(ctx, c.clone(), None, then_branch)?;
                let t2 = self.synth_branch(ctx, Predicate::not(c.clone()), None, else_branch)?;
                join(e.span, c.clone(), t1, Predicate::not(c), t2)
            }
            TermKind::Match {
                scrutinee,
                zero_branch,
                suc_binder,
                suc_branch,
            } => {
                let s = self.nat_scrutinee(ctx, scrutinee)?;
                let z = is_zero(&s);
                let t1 = self.synth_branch(ctx, z.clone(), None, zero_branch)?;
                let t2 = self.synth_branch(ctx, Predicate::tt(), Some((suc_binder, &s)), suc_branch)?;
                join(e.span, z.clone(), t1, Predicate::not(z), t2)
            }
            TermKind::Pair { value, .. } => self.synth_inner(ctx, value),
            TermKind::Annot(inner, st) => {
                let a = self.elab_type(st)?;
                self.check_term(ctx, inner, &a)?;
                Ok(a)
            }
        }
    }

    /// Synthesizes a branch under `path`. A successor branch binds its
    /// predecessor, which is then replaced by `s - 1` in the result.
    fn synth_branch(
        &mut self,
        ctx: &mut TypingContext,
        path: Predicate,
        suc: Option<(&String, &LinearTerm)>,
        e: &Term,
    ) -> TResult<RefinedType> {
        let m = self.mark(ctx);
        ctx.assume(path);
        let r = (|| {
            let mut pred_of = None;
            if let Some((binder, s)) = suc {
                let k = self.fresh(binder);
                ctx.bind(&k, RefinedType::base(BaseType::Nat));
                self.push_scope(binder, &k, Kind::Base(BaseType::Nat));
                ctx.assume(is_successor(s, &k, e.span)?);
                pred_of = Some((k, s.add_constant(-1).map_err(ovf(e.span))?));
            }
            let mut t = self.synth_inner(ctx, e)?;
            if let Some((k, prev)) = pred_of {
                t = t.subst(&k, &Operand::Int(prev)).map_err(ovf(e.span))?;
            }
            Ok(t)
        })();
        self.restore(ctx, m);
        let t = r?;
        let allowed: HashSet<&str> = ctx.names().collect();
        Ok(t.weaken_to(&|n| allowed.contains(n)))
    }
}

fn is_zero(s: &LinearTerm) -> Predicate {
    Predicate::cmp(logic::CmpOp::Eq, s.clone(), LinearTerm::constant(0))
}

fn is_successor(s: &LinearTerm, k: &str, span: Span) -> TResult<Predicate> {
    let succ = LinearTerm::var(k).add_constant(1).map_err(ovf(span))?;
    Ok(Predicate::cmp(logic::CmpOp::Eq, s.clone(), succ))
}

/// Type of a conditional: `(c1 => P1) && (c2 => P2)` over the joined base.
fn join(
    span: Span,
    c1: Predicate,
    t1: RefinedType,
    c2: Predicate,
    t2: RefinedType,
) -> TResult<RefinedType> {
    let (
        RefinedType::Base {
            base: b1,
            binder: x1,
            pred: p1,
        },
        RefinedType::Base {
            base: b2,
            binder: x2,
            pred: p2,
        },
    ) = (&t1, &t2)
    else {
        return Err(TypeError::CannotSynthesize {
            what: "a conditional of function type".into(),
            span,
        });
    };
    if !numeric_compatible(*b1, *b2) {
        return Err(mismatch(span, &t1, &t2));
    }
    let base = if b1 == b2 { *b1 } else { BaseType::Int };
    let mut avoid = c1.free_vars();
    avoid.extend(c2.free_vars());
    avoid.extend(t1.free_vars());
    avoid.extend(t2.free_vars());
    let v = pick_binder(&avoid);
    let op = var_operand(&v, base);
    let mut parts = Vec::new();
    for (c, x, p) in [(c1, x1, p1), (c2, x2, p2)] {
        if !p.is_true() {
            parts.push(Predicate::implies(c, p.subst(x, &op).map_err(ovf(span))?));
        }
    }
    Ok(RefinedType::refined(base, v, Predicate::and(parts)))
}

// ---- public entry points ----

/// Synthesizes a type for `e` in `ctx`, returning it with the VCs emitted.
/// Witness bindings the type depends on are added to `ctx`.
pub fn synth(
    ctx: &mut TypingContext,
    e: &Term,
) -> TResult<(RefinedType, Vec<VerificationCondition>)> {
    let mut c = Checker::for_context(ctx);
    let t = c.synth_term(ctx, e)?;
    Ok((t, c.take_vcs()))
}

/// VCs whose validity makes `e` an inhabitant of `t` in `ctx`.
pub fn check(
    ctx: &TypingContext,
    e: &Term,
    t: &RefinedType,
) -> TResult<Vec<VerificationCondition>> {
    let mut c = Checker::for_context(ctx);
    let mut ctx = ctx.clone();
    c.check_term(&mut ctx, e, t)?;
    Ok(c.take_vcs())
}

/// VCs whose validity makes `s` a subtype of `t` in `ctx`.
pub fn subtype(
    ctx: &TypingContext,
    s: &RefinedType,
    t: &RefinedType,
) -> TResult<Vec<VerificationCondition>> {
    let mut c = Checker::for_context(ctx);
    let mut ctx = ctx.clone();
    let origin = Origin {
        span: Span::DUMMY,
        reason: format!("{s} <: {t}"),
    };
    c.subtype_at(&mut ctx, s, t, &origin)?;
    Ok(c.take_vcs())
}

/// Elaborates an alias-free surface type whose refinements may mention the
/// base-typed names of `ctx`.
pub fn elaborate_type(ctx: &TypingContext, t: &SurfaceType) -> TResult<RefinedType> {
    Checker::for_context(ctx).elab_type(t)
}

/// Every refinement is a well-sorted formula over the names in scope.
pub fn well_formed(ctx: &TypingContext, t: &RefinedType) -> TResult<()> {
    let env: Vec<(String, Sort)> = ctx
        .bindings()
        .filter_map(|(n, ty)| ty.base_type().map(|b| (n.to_string(), b.sort())))
        .collect();
    wf(&env, t)
}

fn wf(env: &[(String, Sort)], t: &RefinedType) -> TResult<()> {
    match t {
        RefinedType::Base { base, binder, pred } => {
            let sort_of = |x: &str| {
                if x == binder {
                    return Some(base.sort());
                }
                env.iter().rev().find(|(n, _)| n == x).map(|(_, s)| *s)
            };
            logic::well_sorted(pred, &sort_of)
                .map_err(|issue| sort_error(Span::DUMMY, "a well-sorted refinement", issue))
        }
        RefinedType::Fun {
            param,
            domain,
            codomain,
        } => {
            wf(env, domain)?;
            let mut inner = env.to_vec();
            if let Some(b) = domain.base_type() {
                inner.push((param.clone(), b.sort()));
            } else {
                inner.retain(|(n, _)| n != param);
            }
            wf(&inner, codomain)
        }
    }
}

/// Checks every item in order, collecting VCs and type errors. Aliases must
/// already be expanded.
pub fn check_program(p: &SurfaceProgram) -> ProgramCheck {
    let globals: Vec<String> = p
        .items
        .iter()
        .filter(|i| !matches!(i, Item::Alias(_)))
        .map(|i| i.name().to_string())
        .collect();
    let mut ctx = TypingContext::new();
    let mut scope: Vec<ScopeEntry> = Vec::new();
    let mut out = ProgramCheck::default();
    let mut defined: HashSet<String> = HashSet::new();

    for item in &p.items {
        let name = item.name().to_string();
        if matches!(item, Item::Alias(_)) {
            continue;
        }
        if !defined.insert(name.clone()) {
            out.errors.push(TypeError::DuplicateDefinition {
                name,
                span: item.span(),
            });
            continue;
        }
        let mut c = Checker {
            scope: scope.clone(),
            used: globals.iter().cloned().collect(),
            counters: HashMap::new(),
            vcs: Vec::new(),
            item: Some(name.clone()),
        };
        let result = match item {
            Item::Val(v) => match c.elab_type(&v.ty) {
                Err(e) => Err(e),
                Ok(ty) => {
                    let r = c.check_term(&mut ctx, &v.body, &ty);
                    ctx.bind(&name, ty.clone());
                    scope.push(ScopeEntry {
                        surface: name.clone(),
                        internal: name.clone(),
                        kind: Kind::of(&ty),
                    });
                    r
                }
            },
            Item::Fun(f) => match signature(&mut c, f) {
                Err(e) => Err(e),
                Ok(sig) => {
                    ctx.bind(&name, sig.clone());
                    scope.push(ScopeEntry {
                        surface: name.clone(),
                        internal: name.clone(),
                        kind: Kind::Fun,
                    });
                    c.scope = scope.clone();
                    check_fun_body(&mut c, &mut ctx, f, sig)
                }
            },
            Item::Alias(_) => unreachable!(),
        };
        match result {
            Ok(()) => out.vcs.extend(c.take_vcs()),
            Err(e) => out.errors.push(e),
        }
    }
    out
}

fn signature(c: &mut Checker, f: &crate::surface::FunDef) -> TResult<RefinedType> {
    let len = c.scope.len();
    let r = (|| {
        let mut domains = Vec::new();
        for p in &f.params {
            let d = c.elab_type(&p.ty)?;
            c.push_scope(&p.name, &p.name, Kind::of(&d));
            domains.push((p.name.clone(), d));
        }
        let mut t = c.elab_type(&f.ret)?;
        for (p, d) in domains.into_iter().rev() {
            t = RefinedType::fun(p, d, t);
        }
        Ok(t)
    })();
    c.scope.truncate(len);
    r
}

fn check_fun_body(
    c: &mut Checker,
    ctx: &mut TypingContext,
    f: &crate::surface::FunDef,
    sig: RefinedType,
) -> TResult<()> {
    let m = c.mark(ctx);
    let r = (|| {
        let mut current = sig;
        for p in &f.params {
            let RefinedType::Fun {
                param,
                domain,
                codomain,
            } = current
            else {
                unreachable!("signature has one arrow per parameter")
            };
            let x = c.fresh(&p.name);
            ctx.bind(&x, (*domain).clone());
            c.push_scope(&p.name, &x, Kind::of(&domain));
            current = c.instantiate(&codomain, &param, &x, &domain, p.span)?;
        }
        c.check_term(ctx, &f.body, &current)
    })();
    c.restore(ctx, m);
    r
}
