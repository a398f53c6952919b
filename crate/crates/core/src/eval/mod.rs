//! Call-by-value evaluation of erased programs, counting beta reductions and
//! branch discriminations.

pub mod erase;
pub mod interp;
pub mod value;

pub use erase::{erase, erase_program};
pub use interp::{eval, EvalError, Evaluator, DEFAULT_FUEL};
pub use value::{Closure, Env, StepCount, Value};
