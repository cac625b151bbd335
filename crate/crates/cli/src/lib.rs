//! Command-line front end and editor service for `adaptor-core`.

pub mod cli;
pub mod service;
