//! Numerical laboratory for concentration of measure on spheres, rotation
//! groups and Grassmannians, with the curvature-pinching arithmetic built
//! on top of it.
//!
//! Monte Carlo estimators run over fixed-size chunks of seeded streams;
//! with the `parallel` feature (default) chunks are spread over rayon,
//! otherwise they run sequentially. Results are identical either way.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod concentration;
pub mod error;
pub mod homogeneous;
pub mod io;
pub mod metric;
pub mod par;
pub mod pinching;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
pub use par::Execution;
