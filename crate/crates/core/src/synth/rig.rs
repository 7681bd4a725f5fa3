use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{CameraId, CameraModel, DistortionCoeffs, ExtrinsicPose, Intrinsics, Rig};

/// A four-camera surround rig described by its raw sensor, the
/// crop/resize preprocessing applied before the network, and per-camera
/// mounting poses. All cameras share intrinsics and distortion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigSpec {
    pub raw_width: u32,
    pub raw_height: u32,
    pub focal: f64,
    pub distortion: DistortionCoeffs,
    pub crop_top: u32,
    pub crop_bottom: u32,
    pub out_width: u32,
    pub out_height: u32,
    pub poses: [(CameraId, ExtrinsicPose); 4],
}

/// Pose of a camera mounted at `(x, y, z)` in the ego frame, looking along
/// the ground-plane heading `heading` and pitched down by `tilt`.
///
/// The camera frame is x right, y down, z forward. With zero tilt and
/// heading the optical axis points along ego +x.
pub fn mounted_pose(x: f64, y: f64, z: f64, heading: f64, tilt: f64) -> ExtrinsicPose {
    use std::f64::consts::FRAC_PI_2;
    ExtrinsicPose {
        x,
        y,
        z,
        pitch: 0.0,
        yaw: heading - FRAC_PI_2,
        roll: -FRAC_PI_2 - tilt,
    }
}

impl RigSpec {
    /// Surround-view fixture: a 1920x1280 sensor cropped by 200 rows on top
    /// and 210 at the bottom, resized to 640x480. The ego origin is the
    /// front-bumper center on the ground; the body spans 4.8 m backwards.
    pub fn fixture() -> Self {
        use std::f64::consts::{FRAC_PI_2, PI};
        Self {
            raw_width: 1920,
            raw_height: 1280,
            focal: 560.0,
            distortion: DistortionCoeffs::new(-0.05, 0.01, -0.002, 0.0001),
            crop_top: 200,
            crop_bottom: 210,
            out_width: 640,
            out_height: 480,
            poses: [
                (CameraId::Front, mounted_pose(0.0, 0.0, 0.7, 0.0, 0.3)),
                (CameraId::Left, mounted_pose(-1.9, 1.0, 1.0, FRAC_PI_2, 0.6)),
                (CameraId::Right, mounted_pose(-1.9, -1.0, 1.0, -FRAC_PI_2, 0.6)),
                (CameraId::Rear, mounted_pose(-4.8, 0.0, 0.9, PI, 0.3)),
            ],
        }
    }

    /// The raw (pre-crop) camera for one pose.
    pub fn raw_camera(&self, pose: ExtrinsicPose) -> Result<CameraModel> {
        let intrinsics = Intrinsics::new(
            self.focal,
            self.focal,
            self.raw_width as f64 / 2.0,
            self.raw_height as f64 / 2.0,
        );
        CameraModel::new(intrinsics, self.distortion, pose, self.raw_width, self.raw_height)
    }

    /// Cameras as seen by the network, after crop and resize.
    pub fn build(&self) -> Result<Rig> {
        let mut rig = Rig::new();
        for (id, pose) in self.poses {
            let camera = self.raw_camera(pose)?.adjust_for_preprocess(
                self.crop_top,
                self.crop_bottom,
                self.out_width,
                self.out_height,
            )?;
            rig.insert(id, camera);
        }
        Ok(rig)
    }
}

/// Ego body footprint `[x_min, x_max, y_min, y_max]` for the fixture rig.
pub const EGO_FOOTPRINT: [f64; 4] = [-4.8, 0.0, -1.0, 1.0];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CamPoint3, EgoPoint3};

    #[test]
    fn optical_axes_point_outwards() {
        let rig = RigSpec::fixture().build().unwrap();
        let expect = [
            (CameraId::Front, [1.0, 0.0]),
            (CameraId::Left, [0.0, 1.0]),
            (CameraId::Right, [0.0, -1.0]),
            (CameraId::Rear, [-1.0, 0.0]),
        ];
        for (id, dir) in expect {
            let pose = rig.get(id).unwrap().pose();
            let origin = pose.cam_to_ego(CamPoint3::new(0.0, 0.0, 0.0));
            let ahead = pose.cam_to_ego(CamPoint3::new(0.0, 0.0, 1.0));
            let d = [ahead.x - origin.x, ahead.y - origin.y, ahead.z - origin.z];
            let horiz = d[0].hypot(d[1]);
            assert!((d[0] / horiz - dir[0]).abs() < 1e-12 && (d[1] / horiz - dir[1]).abs() < 1e-12, "{id}");
            assert!(d[2] < 0.0, "{id} should look down");
            // Camera y (down) maps to ego -z when there is no tilt component sideways.
            let down = pose.cam_to_ego(CamPoint3::new(0.0, 1.0, 0.0));
            assert!(down.z < origin.z);
        }
    }

    #[test]
    fn camera_yaw_adds_heading_for_boxes() {
        // A box ahead of the front camera with ego heading 0 has camera yaw pi/2.
        let pose = mounted_pose(0.0, 0.0, 0.7, 0.0, 0.3);
        assert!((pose.yaw + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let p = pose.ego_to_cam(EgoPoint3::new(5.0, 0.0, 0.7));
        assert!(p.z > 0.0 && p.x.abs() < 1e-12);
    }

    #[test]
    fn preprocessed_intrinsics() {
        let rig = RigSpec::fixture().build().unwrap();
        let k = rig.get(CameraId::Front).unwrap().intrinsics();
        assert!((k.f_u - 560.0 / 3.0).abs() < 1e-12);
        assert!((k.f_v - 560.0 * 480.0 / 870.0).abs() < 1e-12);
        assert!((k.c_u - 320.0).abs() < 1e-12);
        assert!((k.c_v - 440.0 * 480.0 / 870.0).abs() < 1e-12);
    }
}
