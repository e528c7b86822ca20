//! Exact arithmetic, boundary automaton and boundary parametrization for the
//! family of cubic Rauzy fractals attached to `x³ − a·x² + x − 1`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod automaton;
pub mod codec;
pub mod error;
pub mod geometry;
pub mod numeration;
pub mod render;

pub use algebra::{AlgNum, Embedding, FamilyParam, PreciseEmbedding};
pub use error::{Error, Result};
