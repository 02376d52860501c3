//! Library half of the `cde` command-line tool: subcommand logic and the
//! solver comparison experiment.

pub mod commands;
pub mod experiment;

/// Client-count guard for experiments unless `CDE_MAX_K` says otherwise.
pub const DEFAULT_EXPERIMENT_MAX_K: usize = 10;

/// Reads `CDE_MAX_K`, falling back to `default`.
pub fn max_clients(default: usize) -> usize {
    std::env::var("CDE_MAX_K")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}
