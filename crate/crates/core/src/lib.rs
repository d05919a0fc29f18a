//! Exactly psi-approximable vectors over the field of formal Laurent series
//! F_q((X^{-1})).
//!
//! The crate builds points whose approximation exponent is pinned exactly to a
//! prescribed function psi, certifies them through the lattice dynamics of the
//! diagonal flow, and reports branching-based dimension estimates.

pub mod algebra;
pub mod cantor;
pub mod dimension;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod template;

pub use error::{Error, Result};
