//! Command implementations behind the `scssim` binary.

pub mod args;
pub mod commands;
pub mod failure;
pub mod grid;
pub mod kodak;
pub mod stats;

pub use failure::{ExitCode, Failure};
