use std::fmt::{self, Display, Formatter};

use crate::logic::{LinearTerm, Operand, Overflow, Predicate, Sort};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseType {
    Nat,
    Int,
    Bool,
}

impl BaseType {
    pub fn sort(self) -> Sort {
        match self {
            BaseType::Nat | BaseType::Int => Sort::Int,
            BaseType::Bool => Sort::Bool,
        }
    }

    pub fn is_numeric(self) -> bool {
        self.sort() == Sort::Int
    }
}

impl Display for BaseType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseType::Nat => "Nat",
            BaseType::Int => "Int",
            BaseType::Bool => "Bool",
        })
    }
}

/// `{binder: base | pred}` or a dependent function type whose codomain may
/// mention `param`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefinedType {
    Base {
        base: BaseType,
        binder: String,
        pred: Predicate,
    },
    Fun {
        param: String,
        domain: Box<RefinedType>,
        codomain: Box<RefinedType>,
    },
}

/// The part of a name before any `!k` freshening suffix.
pub fn base_name(name: &str) -> &str {
    match name.find('!') {
        Some(0) | None => name,
        Some(i) => &name[..i],
    }
}

fn fresh_avoiding(hint: &str, avoid: &[String]) -> String {
    let base = base_name(hint);
    (1..)
        .map(|k| format!("{base}!{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded search")
}

impl RefinedType {
    /// Unrefined base type, `{v: base | true}`.
    pub fn base(base: BaseType) -> Self {
        RefinedType::Base {
            base,
            binder: "v".into(),
            pred: Predicate::tt(),
        }
    }

    pub fn refined(base: BaseType, binder: impl Into<String>, pred: Predicate) -> Self {
        RefinedType::Base {
            base,
            binder: binder.into(),
            pred,
        }
    }

    pub fn fun(param: impl Into<String>, domain: RefinedType, codomain: RefinedType) -> Self {
        RefinedType::Fun {
            param: param.into(),
            domain: Box::new(domain),
            codomain: Box::new(codomain),
        }
    }

    pub fn base_type(&self) -> Option<BaseType> {
        match self {
            RefinedType::Base { base, .. } => Some(*base),
            RefinedType::Fun { .. } => None,
        }
    }

    pub fn is_fun(&self) -> bool {
        matches!(self, RefinedType::Fun { .. })
    }

    /// The refinement of a base type instantiated at `name`.
    pub fn fact_about(&self, name: &str) -> Option<Predicate> {
        match self {
            RefinedType::Base { binder, pred, .. } => Some(pred.rename(binder, name)),
            RefinedType::Fun { .. } => None,
        }
    }

    /// Free variables, excluding binders.
    pub fn free_vars(&self) -> Vec<String> {
        match self {
            RefinedType::Base { binder, pred, .. } => pred
                .free_vars()
                .into_iter()
                .filter(|x| x != binder)
                .collect(),
            RefinedType::Fun {
                param,
                domain,
                codomain,
            } => {
                let mut out = domain.free_vars();
                for x in codomain.free_vars() {
                    if &x != param && !out.contains(&x) {
                        out.push(x);
                    }
                }
                out
            }
        }
    }

    /// Capture-avoiding substitution of `with` for the variable `name`.
    pub fn subst(&self, name: &str, with: &Operand) -> Result<RefinedType, Overflow> {
        let with_fv = with.free_vars();
        match self {
            RefinedType::Base { base, binder, pred } => {
                if binder == name {
                    return Ok(self.clone());
                }
                if with_fv.contains(binder) {
                    let mut avoid = with_fv.clone();
                    avoid.extend(pred.free_vars());
                    avoid.push(name.to_string());
                    let fresh = fresh_avoiding(binder, &avoid);
                    let renamed = pred.rename(binder, &fresh);
                    return Ok(RefinedType::Base {
                        base: *base,
                        binder: fresh,
                        pred: renamed.subst(name, with)?,
                    });
                }
                Ok(RefinedType::Base {
                    base: *base,
                    binder: binder.clone(),
                    pred: pred.subst(name, with)?,
                })
            }
            RefinedType::Fun {
                param,
                domain,
                codomain,
            } => {
                let domain = Box::new(domain.subst(name, with)?);
                if param == name {
                    return Ok(RefinedType::Fun {
                        param: param.clone(),
                        domain,
                        codomain: codomain.clone(),
                    });
                }
                if with_fv.contains(param) {
                    let mut avoid = with_fv.clone();
                    avoid.extend(codomain.free_vars());
                    avoid.push(name.to_string());
                    let fresh = fresh_avoiding(param, &avoid);
                    let renamed = codomain.rename(param, &fresh);
                    return Ok(RefinedType::Fun {
                        param: fresh,
                        domain,
                        codomain: Box::new(renamed.subst(name, with)?),
                    });
                }
                Ok(RefinedType::Fun {
                    param: param.clone(),
                    domain,
                    codomain: Box::new(codomain.subst(name, with)?),
                })
            }
        }
    }

    /// Renames a free variable at either sort.
    pub fn rename(&self, from: &str, to: &str) -> RefinedType {
        let int = Operand::Int(LinearTerm::var(to));
        let boolean = Operand::Bool(Predicate::Var(to.to_string()));
        self.subst(from, &int)
            .and_then(|t| t.subst(from, &boolean))
            .expect("renaming cannot overflow")
    }

    /// Replaces refinements that mention names outside `allowed` by `true`.
    pub fn weaken_to(&self, allowed: &dyn Fn(&str) -> bool) -> RefinedType {
        match self {
            RefinedType::Base { base, binder, pred } => {
                let ok = pred.free_vars().iter().all(|x| x == binder || allowed(x));
                RefinedType::Base {
                    base: *base,
                    binder: binder.clone(),
                    pred: if ok { pred.clone() } else { Predicate::tt() },
                }
            }
            RefinedType::Fun {
                param,
                domain,
                codomain,
            } => {
                let inner = |x: &str| x == param || allowed(x);
                RefinedType::Fun {
                    param: param.clone(),
                    domain: Box::new(domain.weaken_to(allowed)),
                    codomain: Box::new(codomain.weaken_to(&inner)),
                }
            }
        }
    }
}

impl Display for RefinedType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            RefinedType::Base { base, pred, .. } if pred.is_true() => write!(f, "{base}"),
            RefinedType::Base { base, binder, pred } => write!(f, "{{{binder}: {base} | {pred}}}"),
            RefinedType::Fun {
                param,
                domain,
                codomain,
            } => write!(f, "({param} : {domain}) -> {codomain}"),
        }
    }
}
