//! Library half of the `sjg` binary: subcommands, the verification
//! harness and its reports.

pub mod commands;
pub mod harness;
pub mod report;
