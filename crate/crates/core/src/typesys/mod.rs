//! Refinement types and the bidirectional checker that reduces typing to
//! verification conditions.

pub mod check;
pub mod context;
pub mod error;
pub mod types;
pub mod vc;

pub use check::{
    check, check_program, elaborate_type, subtype, synth, well_formed, Checker, ProgramCheck,
};
pub use context::{Entry, TypingContext};
pub use error::TypeError;
pub use types::{base_name, BaseType, RefinedType};
pub use vc::{Origin, VerificationCondition};
