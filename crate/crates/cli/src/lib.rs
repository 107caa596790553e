//! Command-line front end: run configurations, the job registry and the CSV
//! and JSON writers behind the `qfi` binary.

// `!(x > 0.0)` style tests also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod error;
pub mod jobs;
pub mod record;

pub use app::{main_with_args, run};
pub use config::RunConfig;
pub use error::RunError;
pub use record::ResultRecord;
