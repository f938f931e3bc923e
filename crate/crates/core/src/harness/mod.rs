//! Reproducible experiment runner behind the `pinlab` binary.

mod config;
mod run;
pub mod svg;

pub use config::*;
pub use run::*;
