//! Command-line front end and verification campaigns for `mmi-core`.

pub mod commands;
pub mod doc;
pub mod error;
pub mod manifest;
pub mod suites;
