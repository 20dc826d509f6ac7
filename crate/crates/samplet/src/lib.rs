//! File formats, synthetic benchmarks and the command-line front end for
//! samplet basis pursuit, built on [`samplet_core`].

pub mod bench;
pub mod cli;
pub mod config;
mod error;
pub mod io;
pub mod opfile;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
pub use samplet_core as core;
