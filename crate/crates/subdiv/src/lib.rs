//! Sprague-Grundy values of subtraction-division games G_{a,b}, where a move
//! takes n to n - a or to ceil(n / b), with oracles that predict them.

pub mod blockgraph;
pub mod characterize;
pub mod cli;
pub mod digits;
pub mod engine;
pub mod error;
pub mod export;
pub mod holding;
pub mod reductions;
mod sweep;

pub use error::{Error, Result};
