//! File formats, parallel drivers and run manifests around `qrs-core`,
//! plus the `qrs` command-line tool.

pub mod config;
pub mod error;
pub mod faultsweep;
pub mod fractions;
pub mod manifest;
pub mod sweep;

pub use error::{Result, ToolError};
