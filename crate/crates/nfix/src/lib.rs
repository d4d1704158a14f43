//! JSON problem files, CSV traces and the `nfix` command line on top of
//! `nfix-core`.

pub mod cli;
pub mod problem;
pub mod suites;
pub mod trace;

pub use problem::{ConfigError, Problem, ProblemFile};
