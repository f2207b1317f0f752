//! Laminar-constrained spanning trees.
//!
//! Solves the LP relaxation with exact rational simplex and separation
//! oracles, reduces the fractional point to one aligned with a refined laminar
//! family, and rounds it by iterative relaxation. Every output tree carries a
//! certificate that is re-checked by direct counting.

pub mod cli;
pub mod error;
pub mod harness;
pub mod lp;
pub mod matroid;
pub mod model;
pub mod oracles;
pub mod pipeline;
pub mod rational;
pub mod reduction;
pub mod rounding;

pub use error::{Error, Result};
pub use rational::Rational;
