//! Fisheye surround-view perception toolkit.
//!
//! * [`geometry`]: fisheye projection and unprojection with a lookup-table
//!   accelerated inverse, intrinsics bookkeeping for crop/resize, rig poses.
//! * [`codec`]: projected-3D-center target maps, training losses and decoding
//!   of predicted maps into scored 3D/2D detections.
//! * [`bev`]: camera-to-ego transforms, bird's-eye-view projection and
//!   surround-view fusion, plus the detection interchange format.
//! * [`eval`]: 2D/BEV/3D IoU, AP40 / AR and absolute relative depth error.
//! * [`synth`]: seeded synthetic scenes and ideal predictions.

// Validation uses `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod bev;
pub mod codec;
pub mod eval;
pub mod geometry;
pub mod synth;

pub use error::{Error, Result};
