//! Numerical toolkit for multilinear singular integrals and their weighted
//! theory on uniform 1-D grids: Orlicz (Luxemburg) norms, multilinear
//! maximal functions, multiple-weight constants, a concrete bilinear
//! singular operator with iterated commutators, and endpoint/sharpness
//! experiment drivers.

// Validation guards use the negated form `!(x > 0.0)` on purpose: unlike
// `x <= 0.0`, it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commutator;
pub mod czop;
pub mod endpoint;
pub mod error;
pub mod lattice;
pub mod maximal;
pub mod orlicz;
pub mod weights;

pub use error::{CzError, Result};
