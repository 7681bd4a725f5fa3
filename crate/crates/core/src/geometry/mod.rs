//! Fisheye camera model: distortion polynomial, its lookup-table inverse,
//! projection and unprojection, preprocessing bookkeeping, rig poses and the
//! calibration file.

mod calib;
mod camera;
mod distortion;
mod lut;
mod pose;

pub use calib::{CameraId, Rig, CALIBRATION_FORMAT_VERSION};
pub use camera::{CamPoint3, CameraModel, Intrinsics, InverseMode, Pixel, EPSILON_Z};
pub use distortion::{DistortionCoeffs, EXACT_SOLVER_TOLERANCE};
pub use lut::{DistortionTable, DEFAULT_LUT_GRIDS};
pub use pose::{EgoPoint3, ExtrinsicPose};
