//! File formats and the command-line front end for `satcut-core`.

pub mod cli;
pub mod textio;
