//! Seeded parking-lot scenes for a four-camera fisheye rig, with the
//! predictions an ideal network would produce and flat-ground depth maps.

mod predictions;
mod rig;
mod scene;

pub use predictions::{depth_pair, perfect_predictions, render_ground_depth, NoiseSpec};
pub use rig::{mounted_pose, RigSpec, EGO_FOOTPRINT};
pub use scene::{corner_rectangle, generate, CameraLabels, Scene, SceneSpec, DIMENSION_PRIORS};
