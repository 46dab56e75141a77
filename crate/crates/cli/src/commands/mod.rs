pub mod build_references;
pub mod evaluate;
pub mod optimize;
pub mod report;
pub mod serve;

pub use build_references::{cmd_build_references, BuildRefsSummary};
pub use evaluate::{build_report, cmd_evaluate, write_report};
pub use optimize::cmd_optimize;
pub use report::cmd_report;
pub use serve::{cmd_serve, SandboxService};
