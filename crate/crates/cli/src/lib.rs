//! Configuration files, sweeps, CSV output and oracle verification on top of
//! `mmcovert-core`.

#![warn(missing_docs)]

pub mod config;
pub mod output;
pub mod parallel;
pub mod sweep;
pub mod verify;

pub use config::{config_hash, load_config, parse_config, ConfigError};
pub use output::Table;
pub use parallel::par_estimate;
pub use sweep::{run_sweep, SweepMetric, SweepSpec, SweepVar};
pub use verify::{run_verify, Report, Tier, VerifyOptions};

/// Process exit codes.
pub mod exit {
    /// Success.
    pub const OK: i32 = 0;
    /// Bad config file or arguments.
    pub const CONFIG: i32 = 2;
    /// A solver or quadrature failed.
    pub const NUMERICAL: i32 = 3;
    /// Verification ran but a tolerance was violated.
    pub const VERIFY: i32 = 4;
}
