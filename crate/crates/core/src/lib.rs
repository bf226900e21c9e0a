//! Numerics for Moyal star products and twisted convolutions on rapidly decreasing functions.

pub mod atlas;
pub mod divergence;
pub mod error;
pub mod grid;
pub mod gs;
pub mod logmag;
pub mod multiplier;
pub mod parallel;
pub mod quad;
pub mod star;
pub mod theta;
pub mod witness;

pub use error::{Error, Result};
