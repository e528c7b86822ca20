//! Parallel generation, file export and the verification suite for the
//! cubic Rauzy fractal family, on top of `rauzy-core`.

pub mod export;
pub mod parallel;
pub mod verify;

pub use rauzy_core as core;
