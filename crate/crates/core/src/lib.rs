pub mod calculus;
pub mod connection;
pub mod error;
pub mod flows;
pub mod geometry;
pub mod interp;
pub mod lie;
pub mod moment;
pub mod rational;
pub mod scalars;
pub mod serial;
pub mod suite;
pub mod tensors;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/start.md")]
    mod start {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/brackets.md")]
    mod brackets {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/functionals.md")]
    mod functionals {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
