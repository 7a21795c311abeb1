//! The `dirac` command-line tool as a library, so integration tests and other
//! front ends can drive it without spawning a process.

pub mod app;
pub mod generate;
pub mod report;
pub mod suites;

pub use app::run;
pub use generate::{generate_instance, GenParams, Kind};
pub use report::{Record, RunReport, Status};
pub use suites::{run_suite, Suite, SuiteSize};
