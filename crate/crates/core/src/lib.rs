//! Numerical laboratory for capillary hypersurfaces in the unit ball.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod mobius;
pub mod quermass;
pub mod symfunc;
pub mod verify;

pub use error::{CapflowError, Result};
