//! Std companion to `fdjam-core`: grid sweeps, CSV/JSON export, config
//! files, a rayon chunk runner, brute-force oracles, verification suites and
//! the `fdjam` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod grid;
pub mod oracle;
pub mod parallel;
pub mod verify;

pub use error::{CliError, Result};
pub use grid::{FieldGrid, GridSpec};
