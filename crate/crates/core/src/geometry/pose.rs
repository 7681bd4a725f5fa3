//! Camera-to-ego rigid transforms.
//!
//! The ego frame has its origin at the center of the front bumper, x forward,
//! y left, z up. A camera pose `(x, y, z, pitch, yaw, roll)` places the camera
//! frame in the ego frame with rotation `R = Rz(yaw) * Ry(pitch) * Rx(roll)`,
//! so `p_ego = R * p_cam + t`.

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::geometry::CamPoint3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ExtrinsicPose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub roll: f64,
}

/// A point in the ego (vehicle) frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EgoPoint3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EgoPoint3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

impl ExtrinsicPose {
    pub const fn identity() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 0.0,
            pitch: 0.0,
            yaw: 0.0,
            roll: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.z, self.pitch, self.yaw, self.roll]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn rotation(&self) -> Rotation3<f64> {
        // nalgebra applies roll, then pitch, then yaw: Rz * Ry * Rx.
        Rotation3::from_euler_angles(self.roll, self.pitch, self.yaw)
    }

    pub fn translation(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn cam_to_ego(&self, p: CamPoint3) -> EgoPoint3 {
        let v = self.rotation() * Vector3::new(p.x, p.y, p.z) + self.translation();
        EgoPoint3::new(v.x, v.y, v.z)
    }

    pub fn ego_to_cam(&self, p: EgoPoint3) -> CamPoint3 {
        let v = self.rotation().inverse() * (Vector3::new(p.x, p.y, p.z) - self.translation());
        CamPoint3::new(v.x, v.y, v.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;
    use std::f64::consts::FRAC_PI_2;

    fn rx(a: f64) -> Matrix3<f64> {
        let (s, c) = a.sin_cos();
        Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
    }
    fn ry(a: f64) -> Matrix3<f64> {
        let (s, c) = a.sin_cos();
        Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
    }
    fn rz(a: f64) -> Matrix3<f64> {
        let (s, c) = a.sin_cos();
        Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
    }

    #[test]
    fn identity_and_translation() {
        let p = CamPoint3::new(1.0, -2.0, 3.0);
        assert_eq!(ExtrinsicPose::identity().cam_to_ego(p), EgoPoint3::new(1.0, -2.0, 3.0));
        let t = ExtrinsicPose { x: 1.0, y: 2.0, ..ExtrinsicPose::identity() };
        assert_eq!(t.cam_to_ego(CamPoint3::new(0.0, 0.0, 0.0)), EgoPoint3::new(1.0, 2.0, 0.0));
    }

    #[test]
    fn quarter_yaw_matches_matrix() {
        let pose = ExtrinsicPose { yaw: FRAC_PI_2, ..ExtrinsicPose::identity() };
        let q = pose.cam_to_ego(CamPoint3::new(1.0, 0.0, 0.0));
        let expected = rz(FRAC_PI_2) * Vector3::new(1.0, 0.0, 0.0);
        assert!((q.x - expected.x).abs() < 1e-15 && (q.y - 1.0).abs() < 1e-15 && q.z.abs() < 1e-15);
    }

    #[test]
    fn composite_matches_hand_built_matrices() {
        let pose = ExtrinsicPose { x: 0.3, y: -1.0, z: 0.8, pitch: 0.2, yaw: -2.1, roll: -1.9 };
        let r = rz(pose.yaw) * ry(pose.pitch) * rx(pose.roll);
        assert!((r - pose.rotation().into_inner()).abs().max() < 1e-14);
        assert!((r.determinant() - 1.0).abs() < 1e-9);
        assert!((r.transpose() * r - Matrix3::identity()).abs().max() < 1e-9);
        let p = CamPoint3::new(0.4, 1.5, 6.0);
        let q = pose.cam_to_ego(p);
        let want = r * Vector3::new(p.x, p.y, p.z) + Vector3::new(0.3, -1.0, 0.8);
        assert!((q.x - want.x).abs() < 1e-12 && (q.y - want.y).abs() < 1e-12 && (q.z - want.z).abs() < 1e-12);
        let back = pose.ego_to_cam(q);
        assert!((back.x - p.x).abs() < 1e-9 && (back.y - p.y).abs() < 1e-9 && (back.z - p.z).abs() < 1e-9);
    }
}
