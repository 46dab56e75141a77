//! Library surface of the CLI so integration tests drive the commands
//! directly.

pub mod commands;
pub mod config;

pub use commands::{cmd_build_references, cmd_evaluate, cmd_optimize, cmd_report, cmd_serve};
pub use config::{OptimizerDescriptor, RunConfig};
