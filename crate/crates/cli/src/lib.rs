//! File formats, the verification suite and reporting for multi-Taub-NUT
//! instantons. The numerics live in `taubnut-core`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config_file;
pub mod manifest;
pub mod parallel;
pub mod plot;
pub mod report;
pub mod sampling;
pub mod suite;

pub use manifest::RunManifest;
pub use report::VerificationReport;
pub use suite::{run_suite, CheckName, RunOutcome};
