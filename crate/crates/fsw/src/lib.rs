//! Command-line front end for the `fsw-core` weld model: config files,
//! result files and the `fsw` subcommands.

pub mod commands;
pub mod config;
pub mod output;
pub mod units;
