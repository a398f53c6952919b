//! The `refine` command line: orchestration, diagnostics and reports.

pub mod args;
pub mod diagnostic;
pub mod driver;

pub use args::{CheckArgs, Cli, Command};
pub use diagnostic::{surface_names, Diagnostic, Severity};
pub use driver::{
    exit_code_for, main_with, run_check, FileReport, RunReport, EXIT_INVALID, EXIT_OK,
    EXIT_UNKNOWN,
};
