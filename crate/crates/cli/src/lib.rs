//! Configuration-driven runs of the `warphopf` checks.
//!
//! A run reads a JSON [`RunConfig`], builds the ambient manifold and the
//! surface, evaluates the requested checks and writes a JSON [`Report`].
//! Exit status: 0 when every residual is within tolerance and every
//! expectation holds, 2 otherwise, 1 on configuration or geometry errors.

pub mod config;
pub mod run;

pub use config::{
    Check, ConfigError, Expect, ManifoldConfig, OutputConfig, RunConfig, SurfaceConfig,
    SurfaceKind, SurfaceParams, Tolerances,
};
pub use run::{
    resolve_threads, run, run_file, write_report, CheckResult, Report, RunError, RunOptions,
};
