//! The `strata` command-line tool and HTTP service.

pub mod commands;
pub mod failure;
pub mod server;

pub use commands::{execute, Cli};
pub use failure::Failure;
