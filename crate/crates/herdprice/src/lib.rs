//! File formats, configuration, the command line and a multi-threaded path
//! engine on top of [`herdprice_core`].

pub mod cli;
pub mod config;
pub mod engine;
pub mod format;
pub mod output;
pub mod surface_io;

pub use engine::ParallelEngine;
pub use herdprice_core as core;
