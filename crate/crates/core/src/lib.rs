//! Numerical laboratory for the 1D cubic NLS with `L^p` data.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod duhamel;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod fit;
pub mod grid;
pub mod homogeneous;
pub mod illposed;
pub mod io;
pub mod reference;
pub mod schrodinger;
pub mod spaces;
pub mod strichartz;
pub mod wellposed;

pub use error::{Error, Result};
pub use grid::{Field, Grid, Representation};
