//! Command-line frontend: scan-log and map-file I/O plus the `gridbelief`
//! subcommands themselves, exposed as a library for integration testing.

// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod mapfile;
pub mod scanlog;

pub use commands::{run, Cli};
