//! Classification of multivariate time-series windows with persistent homology.
//!
//! Each window of a standardized series becomes a point cloud, translated by a
//! symmetry-breaking offset and augmented with anchor points. Its Vietoris–Rips
//! persistence diagram is compared to training diagrams with the 1-Wasserstein
//! distance, and a k-nearest-neighbor vote assigns the class.
//!
//! ```text
//! CSV -> ingest -> windowing -> pointcloud -> persistence -> distance -> classify
//! ```
//!
//! [`pipeline`] runs the whole chain with content-addressed caching of every stage.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classify;
pub mod cli;
pub mod distance;
pub mod error;
pub mod hashing;
pub mod ingest;
pub mod persistence;
pub mod pipeline;
pub mod plot;
pub mod pointcloud;
pub mod windowing;

pub use error::{Error, ErrorCategory, Result};
