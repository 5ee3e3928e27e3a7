//! Library side of the `iterimp` command-line tool: configuration handling
//! and output serialization, kept separate from `main` so the integration
//! and acceptance suites can drive them directly.

pub mod config;
pub mod output;
