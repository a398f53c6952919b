//! Refinement type checking for a small functional language, with
//! verification conditions discharged by an external SMT solver.

pub mod cli;
pub mod eval;
pub mod logic;
pub mod solver;
pub mod span;
pub mod surface;
pub mod typesys;
