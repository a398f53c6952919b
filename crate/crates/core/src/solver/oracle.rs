//! Exhaustive bounded search for counterexamples, independent of any solver.

use thiserror::Error;

use crate::logic::{CmpOp, Overflow, Predicate};
use crate::typesys::{BaseType, VerificationCondition};

use super::model::{Model, ModelValue};
use super::Verdict;

pub const MAX_ORACLE_VARS: usize = 6;
pub const DEFAULT_BOUND: u32 = 25;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no value for `{0}`")]
    MissingVariable(String),
    #[error("`{0}` has a value of the wrong sort")]
    SortMismatch(String),
    #[error("integer overflow during evaluation")]
    Overflow,
}

impl From<Overflow> for EvalError {
    fn from(_: Overflow) -> Self {
        EvalError::Overflow
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{count} variables exceed the oracle limit of {MAX_ORACLE_VARS}")]
    TooManyVariables { count: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Evaluates `p` under a total assignment of its free variables.
pub fn eval_predicate_ground(p: &Predicate, model: &Model) -> Result<bool, EvalError> {
    let lookup = |x: &str| model.get(x).ok_or_else(|| EvalError::MissingVariable(x.to_string()));
    eval_with(p, &lookup)
}

/// Ground evaluation against an arbitrary lookup.
pub fn eval_with(
    p: &Predicate,
    lookup: &impl Fn(&str) -> Result<ModelValue, EvalError>,
) -> Result<bool, EvalError> {
    let int = |x: &str| match lookup(x)? {
        ModelValue::Int(k) => Ok(k),
        ModelValue::Bool(_) => Err(EvalError::SortMismatch(x.to_string())),
    };
    Ok(match p {
        Predicate::Const(b) => *b,
        Predicate::Var(x) => match lookup(x)? {
            ModelValue::Bool(b) => b,
            ModelValue::Int(_) => return Err(EvalError::SortMismatch(x.to_string())),
        },
        Predicate::Cmp(op, a, b) => op.holds(a.eval(&int)?, b.eval(&int)?),
        Predicate::Iff(a, b) => eval_with(a, lookup)? == eval_with(b, lookup)?,
        Predicate::Not(a) => !eval_with(a, lookup)?,
        Predicate::And(ps) => {
            for q in ps {
                if !eval_with(q, lookup)? {
                    return Ok(false);
                }
            }
            true
        }
        Predicate::Or(ps) => {
            for q in ps {
                if eval_with(q, lookup)? {
                    return Ok(true);
                }
            }
            false
        }
        Predicate::Implies(a, b) => !eval_with(a, lookup)? || eval_with(b, lookup)?,
    })
}

/// Whether `model` satisfies every fact of `vc` and falsifies its goal.
pub fn refutes(vc: &VerificationCondition, model: &Model) -> Result<bool, EvalError> {
    for (name, base) in &vc.declarations {
        if *base == BaseType::Nat && model.int(name).is_some_and(|k| k < 0) {
            return Ok(false);
        }
    }
    for f in &vc.facts {
        if !eval_predicate_ground(f, model)? {
            return Ok(false);
        }
    }
    Ok(!eval_predicate_ground(&vc.goal, model)?)
}

fn domain(base: BaseType, bound: i64) -> Vec<i64> {
    match base {
        BaseType::Bool => vec![0, 1],
        BaseType::Nat => (0..=bound).collect(),
        BaseType::Int => (-bound..=bound).collect(),
    }
}

/// Predicate with variables resolved to slots; booleans are stored as 0 or 1.
enum Compiled {
    Const(bool),
    Var(usize),
    Cmp(CmpOp, Vec<(i128, usize)>, i128),
    Iff(Box<Compiled>, Box<Compiled>),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
}

fn compile(p: &Predicate, slot: &impl Fn(&str) -> Option<usize>) -> Result<Compiled, EvalError> {
    let get = |x: &str| slot(x).ok_or_else(|| EvalError::MissingVariable(x.to_string()));
    let boxed = |q: &Predicate| compile(q, slot).map(Box::new);
    Ok(match p {
        Predicate::Const(b) => Compiled::Const(*b),
        Predicate::Var(x) => Compiled::Var(get(x)?),
        Predicate::Cmp(op, a, b) => {
            // a op b  <=>  a - b op 0
            let mut terms: Vec<(i128, usize)> = Vec::new();
            for (sign, t) in [(1i128, a), (-1i128, b)] {
                for (c, x) in t.terms() {
                    let i = get(x)?;
                    let c = sign * i128::from(*c);
                    match terms.iter_mut().find(|(_, j)| *j == i) {
                        Some(slot) => slot.0 += c,
                        None => terms.push((c, i)),
                    }
                }
            }
            terms.retain(|(c, _)| *c != 0);
            let k = i128::from(a.constant_part()) - i128::from(b.constant_part());
            Compiled::Cmp(*op, terms, k)
        }
        Predicate::Iff(a, b) => Compiled::Iff(boxed(a)?, boxed(b)?),
        Predicate::Not(a) => Compiled::Not(boxed(a)?),
        Predicate::And(ps) => Compiled::And(ps.iter().map(|q| compile(q, slot)).collect::<Result<_, _>>()?),
        Predicate::Or(ps) => Compiled::Or(ps.iter().map(|q| compile(q, slot)).collect::<Result<_, _>>()?),
        Predicate::Implies(a, b) => Compiled::Implies(boxed(a)?, boxed(b)?),
    })
}

impl Compiled {
    fn eval(&self, env: &[i64]) -> bool {
        match self {
            Compiled::Const(b) => *b,
            Compiled::Var(i) => env[*i] != 0,
            Compiled::Cmp(op, terms, k) => {
                let lhs = terms
                    .iter()
                    .fold(*k, |acc, (c, i)| acc + c * i128::from(env[*i]));
                match op {
                    CmpOp::Eq => lhs == 0,
                    CmpOp::Ne => lhs != 0,
                    CmpOp::Lt => lhs < 0,
                    CmpOp::Le => lhs <= 0,
                    CmpOp::Gt => lhs > 0,
                    CmpOp::Ge => lhs >= 0,
                }
            }
            Compiled::Iff(a, b) => a.eval(env) == b.eval(env),
            Compiled::Not(a) => !a.eval(env),
            Compiled::And(ps) => ps.iter().all(|q| q.eval(env)),
            Compiled::Or(ps) => ps.iter().any(|q| q.eval(env)),
            Compiled::Implies(a, b) => !a.eval(env) || b.eval(env),
        }
    }
}

/// Searches every assignment with integers in `[-bound, bound]` (naturals in
/// `[0, bound]`) in lexicographic order, first declared name slowest.
pub fn brute_force(vc: &VerificationCondition, bound: u32) -> Result<Verdict, OracleError> {
    let count = vc.declarations.len();
    if count > MAX_ORACLE_VARS {
        return Err(OracleError::TooManyVariables { count });
    }
    let slot = |x: &str| vc.declarations.iter().position(|(n, _)| n == x);
    let facts: Vec<Compiled> = vc
        .facts
        .iter()
        .map(|f| compile(f, &slot))
        .collect::<Result<_, _>>()?;
    let goal = compile(&vc.goal, &slot)?;
    let domains: Vec<Vec<i64>> = vc
        .declarations
        .iter()
        .map(|(_, b)| domain(*b, i64::from(bound)))
        .collect();
    let mut idx = vec![0usize; count];
    let mut env: Vec<i64> = domains.iter().map(|d| d[0]).collect();
    loop {
        if facts.iter().all(|f| f.eval(&env)) && !goal.eval(&env) {
            let model: Model = vc
                .declarations
                .iter()
                .zip(&env)
                .map(|((n, b), &k)| {
                    let v = if *b == BaseType::Bool {
                        ModelValue::Bool(k != 0)
                    } else {
                        ModelValue::Int(k)
                    };
                    (n.clone(), v)
                })
                .collect();
            return Ok(Verdict::Invalid(model));
        }
        // advance the odometer, last position fastest
        let mut pos = count;
        loop {
            if pos == 0 {
                return Ok(Verdict::Valid {
                    bounded: Some(bound),
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < domains[pos].len() {
                env[pos] = domains[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            env[pos] = domains[pos][0];
        }
    }
}
