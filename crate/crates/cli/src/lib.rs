//! Command-line orchestration for `ditop`.
pub mod render;
pub mod report;
pub mod run;

pub use run::{run, CliError, Format, Outcome, Request, Task};
