//! Library side of the `radswap` executable: configuration loading, the
//! verification suite, the simulation subcommands and artifact writing.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "RADSWAP_OUT_DIR";
