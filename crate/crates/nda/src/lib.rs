//! Std companion of `nda-core`: parallel chains, run records, the catalog
//! export and the `nda` command line.

pub mod catalog_json;
pub mod cli;
pub mod compute;
pub mod exec;
pub mod record;
pub mod verify;

pub use cli::run;
