//! Library half of the workbench binary: config grammar, subcommand
//! runners, and artifact emission, kept separate from argument handling so
//! tests can drive them directly.

pub mod config;
pub mod emit;
pub mod run;
