//! Command-line front end, file formats and parallel drivers for
//! `gravkick-core`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod output;
pub mod parallel;
pub mod presets;
pub mod svg;

pub use error::{CliError, Result};
