//! Camera-to-ego transforms, bird's-eye-view projection and surround-view
//! fusion of per-camera detections.

mod fusion;
pub mod records;

pub use fusion::{fuse_bev, fuse_surround, to_bev, to_ego, BevBox, FusionConfig, SurroundFrame};
pub use records::{BevRecord, DetectionRecord, Sensor};
