//! Job files, reports and the `samweb` command-line driver.

pub mod config;
pub mod emit;
pub mod identities;
pub mod parallel;
pub mod report;
pub mod run;

pub use config::{load_config, parse_config, Command, ConfigError, JobConfig, DEFAULT_SEED};
pub use emit::{emit, from_json, to_csv, to_json, to_text, EmitError, Format};
pub use parallel::RayonExecutor;
pub use report::Report;
pub use run::{run, Plot, RunOutput};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const RUNTIME: i32 = 2;
}
