//! Command-line front end and HTTP session service over `seedcheck-core`.

pub mod cli;
pub mod payload;
pub mod service;

pub use payload::{SeedPayload, SCHEMA_VERSION};
