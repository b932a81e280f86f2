//! File formats, the experiment harness and the command-line front end for
//! `msd-core`.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod io;

pub use error::CliError;
