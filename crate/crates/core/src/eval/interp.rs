use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::surface::{ArithOp, CmpOp, Item, LogicOp, Proof, SurfaceProgram, Term, TermKind};

use super::value::{Closure, Env, StepCount, Value};

pub const DEFAULT_FUEL: u64 = 1_000_000;
const MAX_DEPTH: usize = 100_000;
const STACK_BYTES: usize = 512 << 20;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no top-level definition named `{0}`")]
    UnknownEntry(String),
    #[error("`{entry}` takes {expected} argument(s), got {found}")]
    Arity {
        entry: String,
        expected: usize,
        found: usize,
    },
    #[error("out of fuel after {0} steps")]
    OutOfFuel(u64),
    #[error("evaluation nested deeper than {0} calls")]
    TooDeep(usize),
    #[error("unbound variable `{0}` at run time")]
    UnboundVariable(String),
    #[error("`{0}` depends on itself")]
    CyclicValue(String),
    #[error("run-time type error: {0}")]
    Stuck(String),
    #[error("proof component was not erased")]
    UnerasedProof,
    #[error("integer overflow")]
    Overflow,
}

/// Call-by-value interpreter over an erased program.
#[derive(Clone, Copy, Debug)]
pub struct Evaluator<'p> {
    program: &'p SurfaceProgram,
    fuel: u64,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p SurfaceProgram) -> Self {
        Evaluator {
            program,
            fuel: DEFAULT_FUEL,
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    /// Applies `entry` to `args` and returns the result with the steps taken.
    pub fn run(&self, entry: &str, args: &[Value]) -> Result<(Value, StepCount), EvalError> {
        std::thread::scope(|s| {
            std::thread::Builder::new()
                .name("refine-eval".into())
                .stack_size(STACK_BYTES)
                .spawn_scoped(s, || {
                    let mut m = Machine::new(self.program, self.fuel);
                    let v = m.call_entry(entry, args)?;
                    Ok((v, m.steps))
                })
                .expect("spawn evaluator thread")
                .join()
                .expect("evaluator does not panic")
        })
    }
}

/// [`Evaluator::run`] with the default fuel.
pub fn eval(
    program: &SurfaceProgram,
    entry: &str,
    args: &[Value],
) -> Result<(Value, StepCount), EvalError> {
    Evaluator::new(program).run(entry, args)
}

struct Machine<'p> {
    items: HashMap<&'p str, &'p Item>,
    cache: HashMap<String, Value>,
    pending: HashSet<String>,
    steps: StepCount,
    fuel: u64,
    depth: usize,
}

fn stuck(what: impl Into<String>) -> EvalError {
    EvalError::Stuck(what.into())
}

impl<'p> Machine<'p> {
    fn new(program: &'p SurfaceProgram, fuel: u64) -> Self {
        let mut items = HashMap::new();
        for item in &program.items {
            if !matches!(item, Item::Alias(_)) {
                items.entry(item.name()).or_insert(item);
            }
        }
        Machine {
            items,
            cache: HashMap::new(),
            pending: HashSet::new(),
            steps: StepCount::default(),
            fuel,
            depth: 0,
        }
    }

    fn call_entry(&mut self, entry: &str, args: &[Value]) -> Result<Value, EvalError> {
        let Some(item) = self.items.get(entry).copied() else {
            return Err(EvalError::UnknownEntry(entry.to_string()));
        };
        if let Item::Fun(f) = item {
            if f.params.len() != args.len() {
                return Err(EvalError::Arity {
                    entry: entry.to_string(),
                    expected: f.params.len(),
                    found: args.len(),
                });
            }
        }
        let mut v = self.global(entry)?;
        for (i, a) in args.iter().enumerate() {
            if !matches!(v.strip(), Value::Closure(_)) {
                return Err(EvalError::Arity {
                    entry: entry.to_string(),
                    expected: i,
                    found: args.len(),
                });
            }
            v = self.apply(v, a.clone())?;
        }
        Ok(v)
    }

    fn tick_beta(&mut self) -> Result<(), EvalError> {
        self.steps.beta += 1;
        self.check_fuel()
    }

    fn tick_discrimination(&mut self) -> Result<(), EvalError> {
        self.steps.discriminations += 1;
        self.check_fuel()
    }

    fn check_fuel(&self) -> Result<(), EvalError> {
        if self.steps.total() > self.fuel {
            Err(EvalError::OutOfFuel(self.fuel))
        } else {
            Ok(())
        }
    }

    fn global(&mut self, name: &str) -> Result<Value, EvalError> {
        if let Some(v) = self.cache.get(name) {
            return Ok(v.clone());
        }
        let Some(item) = self.items.get(name).copied() else {
            return Err(EvalError::UnboundVariable(name.to_string()));
        };
        let v = match item {
            Item::Fun(f) if !f.params.is_empty() => {
                let mut body = f.body.clone();
                for p in f.params[1..].iter().rev() {
                    body = Term::new(
                        TermKind::Lam {
                            param: p.name.clone(),
                            annotation: None,
                            body: Box::new(body),
                        },
                        f.span,
                    );
                }
                Value::Closure(Arc::new(Closure {
                    param: f.params[0].name.clone(),
                    body,
                    env: Arc::new(Env::Nil),
                }))
            }
            Item::Fun(_) | Item::Val(_) => {
                let body = match item {
                    Item::Fun(f) => &f.body,
                    Item::Val(v) => &v.body,
                    Item::Alias(_) => unreachable!(),
                };
                if !self.pending.insert(name.to_string()) {
                    return Err(EvalError::CyclicValue(name.to_string()));
                }
                let r = self.eval(&Arc::new(Env::Nil), body);
                self.pending.remove(name);
                r?
            }
            Item::Alias(_) => unreachable!(),
        };
        self.cache.insert(name.to_string(), v.clone());
        Ok(v)
    }

    fn apply(&mut self, f: Value, arg: Value) -> Result<Value, EvalError> {
        match f.strip() {
            Value::Closure(c) => {
                self.tick_beta()?;
                let env = c.env.extend(&c.param, arg);
                self.eval(&env, &c.body)
            }
            other => Err(stuck(format!("cannot apply {other}"))),
        }
    }

    fn int(&mut self, env: &Arc<Env>, e: &Term) -> Result<(i64, bool), EvalError> {
        let v = self.eval(env, e)?;
        match v.strip() {
            Value::Nat(k) => Ok((*k, true)),
            Value::Int(k) => Ok((*k, false)),
            other => Err(stuck(format!("expected a number, found {other}"))),
        }
    }

    fn boolean(&mut self, env: &Arc<Env>, e: &Term) -> Result<bool, EvalError> {
        let v = self.eval(env, e)?;
        v.as_bool()
            .ok_or_else(|| stuck(format!("expected a boolean, found {v}")))
    }

    fn eval(&mut self, env: &Arc<Env>, e: &Term) -> Result<Value, EvalError> {
        if self.depth >= MAX_DEPTH {
            return Err(EvalError::TooDeep(MAX_DEPTH));
        }
        self.depth += 1;
        let r = self.eval_inner(env, e);
        self.depth -= 1;
        r
    }

    fn eval_inner(&mut self, env: &Arc<Env>, e: &Term) -> Result<Value, EvalError> {
        match &e.kind {
            TermKind::Var(x) => match env.lookup(x) {
                Some(v) => Ok(v.clone()),
                None => self.global(x),
            },
            TermKind::NatLit(k) => Ok(Value::Nat(*k)),
            TermKind::IntLit(k) => Ok(Value::Int(*k)),
            TermKind::BoolLit(b) => Ok(Value::Bool(*b)),
            TermKind::Arith(op, a, b) => {
                let (x, xn) = self.int(env, a)?;
                let (y, yn) = self.int(env, b)?;
                match op {
                    ArithOp::Add => {
                        let s = x.checked_add(y).ok_or(EvalError::Overflow)?;
                        Ok(if xn && yn { Value::Nat(s) } else { Value::Int(s) })
                    }
                    ArithOp::Sub => Ok(Value::Int(x.checked_sub(y).ok_or(EvalError::Overflow)?)),
                }
            }
            TermKind::Scale(k, a) => {
                let (x, xn) = self.int(env, a)?;
                let p = k.checked_mul(x).ok_or(EvalError::Overflow)?;
                Ok(if xn && *k >= 0 { Value::Nat(p) } else { Value::Int(p) })
            }
            TermKind::Cmp(op, a, b) => {
                let va = self.eval(env, a)?;
                let vb = self.eval(env, b)?;
                let r = match (va.strip(), vb.strip()) {
                    (Value::Bool(x), Value::Bool(y)) => match op {
                        CmpOp::Eq => x == y,
                        CmpOp::Ne => x != y,
                        _ => return Err(stuck("ordering on booleans")),
                    },
                    (x, y) => match (x.as_int(), y.as_int()) {
                        (Some(x), Some(y)) => crate::logic::CmpOp::from(*op).holds(x, y),
                        _ => return Err(stuck(format!("cannot compare {x} and {y}"))),
                    },
                };
                Ok(Value::Bool(r))
            }
            TermKind::Not(a) => Ok(Value::Bool(!self.boolean(env, a)?)),
            TermKind::Logic(op, a, b) => {
                let x = self.boolean(env, a)?;
                let r = match op {
                    LogicOp::And => x && self.boolean(env, b)?,
                    LogicOp::Or => x || self.boolean(env, b)?,
                    LogicOp::Implies => !x || self.boolean(env, b)?,
                };
                Ok(Value::Bool(r))
            }
            TermKind::App(f, a) => {
                let vf = self.eval(env, f)?;
                let va = self.eval(env, a)?;
                self.apply(vf, va)
            }
            TermKind::Lam { param, body, .. } => Ok(Value::Closure(Arc::new(Closure {
                param: param.clone(),
                body: (**body).clone(),
                env: Arc::clone(env),
            }))),
            TermKind::Let { name, bound, body } => {
                let v = self.eval(env, bound)?;
                self.eval(&env.extend(name, v), body)
            }
            TermKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let c = self.boolean(env, cond)?;
                self.tick_discrimination()?;
                self.eval(env, if c { then_branch } else { else_branch })
            }
            TermKind::Match {
                scrutinee,
                zero_branch,
                suc_binder,
                suc_branch,
            } => {
                let (s, _) = self.int(env, scrutinee)?;
                self.tick_discrimination()?;
                match s {
                    0 => self.eval(env, zero_branch),
                    s if s > 0 => self.eval(&env.extend(suc_binder, Value::Nat(s - 1)), suc_branch),
                    s => Err(stuck(format!("match on negative number {s}"))),
                }
            }
            TermKind::Pair { value, proof } => match proof {
                Proof::Erased => Ok(Value::ErasedPair(Box::new(self.eval(env, value)?))),
                Proof::Auto => Err(EvalError::UnerasedProof),
            },
            TermKind::Annot(inner, _) => self.eval(env, inner),
        }
    }
}
