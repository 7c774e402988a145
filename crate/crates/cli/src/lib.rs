//! Pipeline driver behind the `iqa-bench` binary: sample, corrupt, score and
//! report, with per-stage provenance stamps.

pub mod config;
pub mod failure;
pub mod raw;
pub mod stages;
pub mod stamp;

pub use config::{BenchConfig, Cli, Command, Options};
pub use failure::{ExitKind, Failure, Outcome};
pub use stages::{run, Mode, StageRun};
