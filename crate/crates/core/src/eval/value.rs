use std::fmt::{self, Display, Formatter};
use std::ops::{Add, AddAssign};
use std::sync::Arc;

use crate::surface::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Env {
    Nil,
    Cons(String, Value, Arc<Env>),
}

impl Env {
    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = self;
        loop {
            match cur {
                Env::Nil => return None,
                Env::Cons(n, v, rest) => {
                    if n == name {
                        return Some(v);
                    }
                    cur = rest;
                }
            }
        }
    }

    pub fn extend(self: &Arc<Env>, name: &str, v: Value) -> Arc<Env> {
        Arc::new(Env::Cons(name.to_string(), v, Arc::clone(self)))
    }
}

impl Drop for Env {
    // long chains would otherwise drop recursively
    fn drop(&mut self) {
        let mut next = match self {
            Env::Nil => return,
            Env::Cons(_, _, rest) => std::mem::replace(rest, Arc::new(Env::Nil)),
        };
        while let Ok(mut inner) = Arc::try_unwrap(next) {
            next = match &mut inner {
                Env::Nil => return,
                Env::Cons(_, _, rest) => std::mem::replace(rest, Arc::new(Env::Nil)),
            };
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub param: String,
    pub body: Term,
    pub env: Arc<Env>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Nat(i64),
    Int(i64),
    Bool(bool),
    Closure(Arc<Closure>),
    /// A refinement pair after erasure: only the value component remains.
    ErasedPair(Box<Value>),
}

impl Value {
    /// The value component, looking through erased pairs.
    pub fn strip(&self) -> &Value {
        let mut v = self;
        while let Value::ErasedPair(inner) = v {
            v = inner;
        }
        v
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.strip() {
            Value::Nat(k) | Value::Int(k) => Some(*k),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.strip() {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Parses a command-line argument: `true`, `false` or an integer.
    pub fn parse_arg(s: &str) -> Option<Value> {
        match s {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => {
                let k: i64 = s.parse().ok()?;
                Some(if k >= 0 { Value::Nat(k) } else { Value::Int(k) })
            }
        }
    }
}

impl Display for Value {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(k) | Value::Int(k) => write!(f, "{k}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Closure(c) => write!(f, "<function of {}>", c.param),
            Value::ErasedPair(v) => write!(f, "({v}, _)"),
        }
    }
}

/// Beta reductions and `match`/`if` discriminations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepCount {
    pub beta: u64,
    pub discriminations: u64,
}

impl StepCount {
    pub fn total(self) -> u64 {
        self.beta + self.discriminations
    }
}

impl Add for StepCount {
    type Output = StepCount;
    fn add(self, o: StepCount) -> StepCount {
        StepCount {
            beta: self.beta + o.beta,
            discriminations: self.discriminations + o.discriminations,
        }
    }
}

impl AddAssign for StepCount {
    fn add_assign(&mut self, o: StepCount) {
        *self = *self + o;
    }
}

impl Display for StepCount {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} steps ({} beta, {} discriminations)",
            self.total(),
            self.beta,
            self.discriminations
        )
    }
}
