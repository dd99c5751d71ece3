//! Command-line tool and local HTTP service over `mxv-core`.

pub mod api;
pub mod cli;
pub mod error;
pub mod service;
