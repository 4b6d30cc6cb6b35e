//! File formats, timing, parallel experiment batches and the `realfunm`
//! command line, on top of [`realfunm_core`].

pub mod cli;
pub mod experiment;
pub mod io;
pub mod report;

pub use realfunm_core as core;
