//! Type alias expansion.
//!
//! `type Fin(n) = {x: Nat | x < n}` makes `Fin(e)` stand for the body with
//! `n` replaced by `e`. Binders in the body are renamed when they would
//! capture a free variable of `e`.

use std::collections::HashMap;

use thiserror::Error;

use super::ast::*;
use crate::span::Span;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AliasError {
    #[error("type alias `{name}` is defined in terms of itself")]
    CyclicAlias { name: String, span: Span },
    #[error("unknown type `{name}`")]
    UnknownAlias { name: String, span: Span },
    #[error("type alias `{name}` {detail}")]
    AliasArity {
        name: String,
        detail: String,
        span: Span,
    },
    #[error("type alias `{name}` is defined twice")]
    DuplicateAlias { name: String, span: Span },
}

impl AliasError {
    pub fn span(&self) -> Span {
        match self {
            AliasError::CyclicAlias { span, .. }
            | AliasError::UnknownAlias { span, .. }
            | AliasError::AliasArity { span, .. }
            | AliasError::DuplicateAlias { span, .. } => *span,
        }
    }
}

/// Replaces every alias reference in type position by its definition.
/// Alias items are kept, with their own bodies expanded.
pub fn expand_aliases(p: &SurfaceProgram) -> Result<SurfaceProgram, AliasError> {
    let mut defs: HashMap<&str, &AliasDef> = HashMap::new();
    for item in &p.items {
        if let Item::Alias(a) = item {
            if defs.insert(&a.name, a).is_some() {
                return Err(AliasError::DuplicateAlias {
                    name: a.name.clone(),
                    span: a.span,
                });
            }
        }
    }
    let ex = Expander { defs };
    let mut out = SurfaceProgram::default();
    for item in &p.items {
        let item = match item {
            Item::Alias(a) => Item::Alias(AliasDef {
                body: ex.ty(&a.body, &mut vec![a.name.clone()])?,
                ..a.clone()
            }),
            Item::Fun(d) => {
                let mut params = Vec::with_capacity(d.params.len());
                for prm in &d.params {
                    params.push(Param {
                        ty: ex.ty(&prm.ty, &mut vec![])?,
                        ..prm.clone()
                    });
                }
                Item::Fun(FunDef {
                    params,
                    ret: ex.ty(&d.ret, &mut vec![])?,
                    body: ex.term(&d.body)?,
                    ..d.clone()
                })
            }
            Item::Val(v) => Item::Val(ValDef {
                ty: ex.ty(&v.ty, &mut vec![])?,
                body: ex.term(&v.body)?,
                ..v.clone()
            }),
        };
        out.items.push(item);
    }
    Ok(out)
}

struct Expander<'a> {
    defs: HashMap<&'a str, &'a AliasDef>,
}

impl Expander<'_> {
    fn ty(&self, t: &SurfaceType, stack: &mut Vec<String>) -> Result<SurfaceType, AliasError> {
        let kind = match &t.kind {
            TypeKind::Base(_) => t.kind.clone(),
            TypeKind::Refined { binder, base, pred } => TypeKind::Refined {
                binder: binder.clone(),
                base: *base,
                pred: Box::new(self.term_in(pred, stack)?),
            },
            TypeKind::Fun {
                param,
                domain,
                codomain,
            } => TypeKind::Fun {
                param: param.clone(),
                domain: Box::new(self.ty(domain, stack)?),
                codomain: Box::new(self.ty(codomain, stack)?),
            },
            TypeKind::Alias { name, arg } => {
                if stack.contains(name) {
                    return Err(AliasError::CyclicAlias {
                        name: name.clone(),
                        span: t.span,
                    });
                }
                let def = self
                    .defs
                    .get(name.as_str())
                    .ok_or_else(|| AliasError::UnknownAlias {
                        name: name.clone(),
                        span: t.span,
                    })?;
                stack.push(name.clone());
                let body = self.ty(&def.body, stack)?;
                stack.pop();
                let expanded = match (&def.param, arg) {
                    (None, None) => body,
                    (Some(param), Some(arg)) => {
                        let arg = self.term_in(arg, stack)?;
                        subst_type(&body, param, &arg)
                    }
                    (None, Some(_)) => {
                        return Err(AliasError::AliasArity {
                            name: name.clone(),
                            detail: "takes no argument".into(),
                            span: t.span,
                        })
                    }
                    (Some(_), None) => {
                        return Err(AliasError::AliasArity {
                            name: name.clone(),
                            detail: "needs an argument".into(),
                            span: t.span,
                        })
                    }
                };
                // the use site's span stands for the whole expansion
                return Ok(respan_type(expanded, t.span));
            }
        };
        Ok(SurfaceType::new(kind, t.span))
    }

    fn term(&self, e: &Term) -> Result<Term, AliasError> {
        self.term_in(e, &mut vec![])
    }

    fn term_in(&self, e: &Term, stack: &mut Vec<String>) -> Result<Term, AliasError> {
        use TermKind::*;
        let kind = match &e.kind {
            Var(_) | NatLit(_) | IntLit(_) | BoolLit(_) => e.kind.clone(),
            Arith(op, a, b) => Arith(*op, self.boxed(a, stack)?, self.boxed(b, stack)?),
            Scale(k, a) => Scale(*k, self.boxed(a, stack)?),
            Cmp(op, a, b) => Cmp(*op, self.boxed(a, stack)?, self.boxed(b, stack)?),
            Not(a) => Not(self.boxed(a, stack)?),
            Logic(op, a, b) => Logic(*op, self.boxed(a, stack)?, self.boxed(b, stack)?),
            App(a, b) => App(self.boxed(a, stack)?, self.boxed(b, stack)?),
            Lam {
                param,
                annotation,
                body,
            } => Lam {
                param: param.clone(),
                annotation: match annotation {
                    Some(t) => Some(self.ty(t, stack)?),
                    None => None,
                },
                body: self.boxed(body, stack)?,
            },
            Let { name, bound, body } => Let {
                name: name.clone(),
                bound: self.boxed(bound, stack)?,
                body: self.boxed(body, stack)?,
            },
            If {
                cond,
                then_branch,
                else_branch,
            } => If {
                cond: self.boxed(cond, stack)?,
                then_branch: self.boxed(then_branch, stack)?,
                else_branch: self.boxed(else_branch, stack)?,
            },
            Match {
                scrutinee,
                zero_branch,
                suc_binder,
                suc_branch,
            } => Match {
                scrutinee: self.boxed(scrutinee, stack)?,
                zero_branch: self.boxed(zero_branch, stack)?,
                suc_binder: suc_binder.clone(),
                suc_branch: self.boxed(suc_branch, stack)?,
            },
            Pair { value, proof } => Pair {
                value: self.boxed(value, stack)?,
                proof: *proof,
            },
            Annot(a, t) => Annot(self.boxed(a, stack)?, self.ty(t, stack)?),
        };
        Ok(Term::new(kind, e.span))
    }

    fn boxed(&self, e: &Term, stack: &mut Vec<String>) -> Result<Box<Term>, AliasError> {
        Ok(Box::new(self.term_in(e, stack)?))
    }
}

fn respan_type(mut t: SurfaceType, span: Span) -> SurfaceType {
    fn go_ty(t: &mut SurfaceType, span: Span) {
        t.span = span;
        match &mut t.kind {
            TypeKind::Base(_) => {}
            TypeKind::Refined { pred, .. } => go_term(pred, span),
            TypeKind::Fun {
                domain, codomain, ..
            } => {
                go_ty(domain, span);
                go_ty(codomain, span);
            }
            TypeKind::Alias { arg, .. } => {
                if let Some(a) = arg {
                    go_term(a, span);
                }
            }
        }
    }
    fn go_term(e: &mut Term, span: Span) {
        e.span = span;
        match &mut e.kind {
            TermKind::Lam {
                annotation: Some(t),
                body,
                ..
            } => {
                go_ty(t, span);
                go_term(body, span);
            }
            TermKind::Annot(a, t) => {
                go_term(a, span);
                go_ty(t, span);
            }
            _ => {
                for c in children_mut(e) {
                    go_term(c, span);
                }
            }
        }
    }
    go_ty(&mut t, span);
    t
}

fn children_mut(e: &mut Term) -> Vec<&mut Term> {
    use TermKind::*;
    match &mut e.kind {
        Var(_) | NatLit(_) | IntLit(_) | BoolLit(_) => vec![],
        Arith(_, a, b) | Cmp(_, a, b) | Logic(_, a, b) | App(a, b) => vec![a, b],
        Scale(_, a) | Not(a) => vec![a],
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
        Annot(a, _) => vec![a],
    }
}

/// A name based on `base` that is not in `avoid`.
fn fresh_surface(base: &str, avoid: &[String]) -> String {
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded search")
}

/// Capture-avoiding substitution of `arg` for `name` in a type.
pub fn subst_type(t: &SurfaceType, name: &str, arg: &Term) -> SurfaceType {
    let arg_fv = arg.free_vars();
    let kind = match &t.kind {
        TypeKind::Base(_) => t.kind.clone(),
        TypeKind::Refined { binder, base, pred } => {
            if binder == name {
                t.kind.clone()
            } else if arg_fv.contains(binder) {
                let mut avoid = arg_fv.clone();
                avoid.extend(pred.free_vars());
                avoid.push(name.to_string());
                let fresh = fresh_surface(binder, &avoid);
                let renamed = subst_term(pred, binder, &var(&fresh, pred.span));
                TypeKind::Refined {
                    binder: fresh,
                    base: *base,
                    pred: Box::new(subst_term(&renamed, name, arg)),
                }
            } else {
                TypeKind::Refined {
                    binder: binder.clone(),
                    base: *base,
                    pred: Box::new(subst_term(pred, name, arg)),
                }
            }
        }
        TypeKind::Fun {
            param,
            domain,
            codomain,
        } => {
            let domain = Box::new(subst_type(domain, name, arg));
            match param {
                Some(p) if p == name => TypeKind::Fun {
                    param: param.clone(),
                    domain,
                    codomain: codomain.clone(),
                },
                Some(p) if arg_fv.contains(p) => {
                    let mut avoid = arg_fv.clone();
                    avoid.extend(codomain.free_vars());
                    avoid.push(name.to_string());
                    let fresh = fresh_surface(p, &avoid);
                    let renamed = subst_type(codomain, p, &var(&fresh, codomain.span));
                    TypeKind::Fun {
                        param: Some(fresh),
                        domain,
                        codomain: Box::new(subst_type(&renamed, name, arg)),
                    }
                }
                _ => TypeKind::Fun {
                    param: param.clone(),
                    domain,
                    codomain: Box::new(subst_type(codomain, name, arg)),
                },
            }
        }
        TypeKind::Alias { name: a, arg: inner } => TypeKind::Alias {
            name: a.clone(),
            arg: inner.as_ref().map(|e| Box::new(subst_term(e, name, arg))),
        },
    };
    SurfaceType::new(kind, t.span)
}

fn var(name: &str, span: Span) -> Term {
    Term::new(TermKind::Var(name.to_string()), span)
}

/// Capture-avoiding substitution of `arg` for `name` in a term.
pub fn subst_term(e: &Term, name: &str, arg: &Term) -> Term {
    use TermKind::*;
    let arg_fv = arg.free_vars();
    let s = |t: &Term| Box::new(subst_term(t, name, arg));
    // (binder, body) under a binder: rename when the binder would capture.
    let under = |binder: &str, body: &Term| -> (String, Box<Term>) {
        if binder == name {
            (binder.to_string(), Box::new(body.clone()))
        } else if arg_fv.iter().any(|v| v == binder) {
            let mut avoid = arg_fv.clone();
            avoid.extend(body.free_vars());
            avoid.push(name.to_string());
            let fresh = fresh_surface(binder, &avoid);
            let renamed = subst_term(body, binder, &var(&fresh, body.span));
            (fresh, Box::new(subst_term(&renamed, name, arg)))
        } else {
            (binder.to_string(), Box::new(subst_term(body, name, arg)))
        }
    };
    let kind = match &e.kind {
        Var(x) if x == name => return arg.clone(),
        Var(_) | NatLit(_) | IntLit(_) | BoolLit(_) => e.kind.clone(),
        Arith(op, a, b) => Arith(*op, s(a), s(b)),
        Scale(k, a) => Scale(*k, s(a)),
        Cmp(op, a, b) => Cmp(*op, s(a), s(b)),
        Not(a) => Not(s(a)),
        Logic(op, a, b) => Logic(*op, s(a), s(b)),
        App(a, b) => App(s(a), s(b)),
        Lam {
            param,
            annotation,
            body,
        } => {
            let annotation = annotation.as_ref().map(|t| subst_type(t, name, arg));
            let (param, body) = under(param, body);
            Lam {
                param,
                annotation,
                body,
            }
        }
        Let {
            name: x,
            bound,
            body,
        } => {
            let bound = s(bound);
            let (x, body) = under(x, body);
            Let {
                name: x,
                bound,
                body,
            }
        }
        If {
            cond,
            then_branch,
            else_branch,
        } => If {
            cond: s(cond),
            then_branch: s(then_branch),
            else_branch: s(else_branch),
        },
        Match {
            scrutinee,
            zero_branch,
            suc_binder,
            suc_branch,
        } => {
            let (suc_binder, suc_branch) = under(suc_binder, suc_branch);
            Match {
                scrutinee: s(scrutinee),
                zero_branch: s(zero_branch),
                suc_binder,
                suc_branch,
            }
        }
        Pair { value, proof } => Pair {
            value: s(value),
            proof: *proof,
        },
        Annot(a, t) => Annot(s(a), subst_type(t, name, arg)),
    };
    Term::new(kind, e.span)
}
