//! File formats and subcommands behind the `robust-mallows` binary.

pub mod commands;
pub mod experiment;
pub mod io;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// IO, parse and parameter errors.
    pub const FAILURE: i32 = 1;
    /// Command-line usage errors (clap's default).
    pub const USAGE: i32 = 2;
    pub const FILTER_DIVERGENCE: i32 = 3;
    pub const NO_HYPOTHESIS: i32 = 4;
    /// An oracle suite ran but some case failed.
    pub const CHECK_FAILED: i32 = 5;
}

/// Exit code for an error returned by a subcommand.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<robust_mallows::Error>() {
        Some(robust_mallows::Error::FilterDivergence { .. }) => exit::FILTER_DIVERGENCE,
        Some(robust_mallows::Error::NoHypothesis { .. }) => exit::NO_HYPOTHESIS,
        _ => exit::FAILURE,
    }
}
