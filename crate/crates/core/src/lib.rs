//! Scalar-curvature-controlled necks, tunnels and surgeries built from
//! warped-product profiles, with numerical certificates.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod bending;
pub mod certify;
pub mod error;
pub mod metric;

pub use error::{NeckError, Result};
