//! File formats, figure presets and the command-line runner on top of
//! `aptsim-core`.

pub mod error;
pub mod figures;
pub mod format;
pub mod io;
pub mod runner;

pub use error::CliError;
pub use runner::{execute, render, Command, Format, Rendered, RunConfig};
