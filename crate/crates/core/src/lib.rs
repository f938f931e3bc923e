pub mod barrier;
pub mod continuum;
pub mod discrete;
mod error;
pub mod field;
pub mod harness;
pub mod percolation;
pub mod quenched;
pub mod rng;
pub mod special;
pub mod supersolution;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/environment.md")]
    mod environment {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/barriers.md")]
    mod barriers {}
    #[doc = include_str!("../../../book/src/percolation.md")]
    mod percolation {}
    #[doc = include_str!("../../../book/src/continuum.md")]
    mod continuum {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
