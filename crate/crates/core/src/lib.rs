//! Centroaffine geometry of level sets of homogeneous functions.
//!
//! Given a homogeneous `h` on `R^{n+1}` and a seed point, the crate builds
//! the radial chart of the component of `{h = 1}` through the seed, computes
//! its centroaffine metric, connection and cubic form, and decides metric
//! completeness by a cascade of certificates with numeric evidence.

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod boundary;
pub mod catalog;
pub mod chart;
pub mod complete;
pub mod error;
pub mod forms;
pub mod homcalc;
pub mod linalg;
pub mod par;
pub mod quad;
pub mod report;
pub mod sampling;
pub mod structure;

pub use error::{Error, Result};
pub use par::Exec;
