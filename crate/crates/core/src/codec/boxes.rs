use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CamPoint3, EgoPoint3, ExtrinsicPose};

/// The eight annotated parking-lot categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    Car,
    Truck,
    Pedestrian,
    Rider,
    BabyCarriage,
    TrafficCone,
    Motorbike,
    NoStopSign,
}

pub const NUM_CLASSES: usize = 8;

impl ObjectClass {
    pub const ALL: [ObjectClass; NUM_CLASSES] = [
        ObjectClass::Car,
        ObjectClass::Truck,
        ObjectClass::Pedestrian,
        ObjectClass::Rider,
        ObjectClass::BabyCarriage,
        ObjectClass::TrafficCone,
        ObjectClass::Motorbike,
        ObjectClass::NoStopSign,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectClass::Car => "car",
            ObjectClass::Truck => "truck",
            ObjectClass::Pedestrian => "pedestrian",
            ObjectClass::Rider => "rider",
            ObjectClass::BabyCarriage => "baby_carriage",
            ObjectClass::TrafficCone => "traffic_cone",
            ObjectClass::Motorbike => "motorbike",
            ObjectClass::NoStopSign => "no_stop_sign",
        }
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown class `{s}`")))
    }
}

/// Coordinate frame a [`Box3D`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Camera,
    Ego,
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    // rem_euclid can land exactly on TAU for tiny negative inputs.
    if w <= -PI {
        w += TAU;
    }
    w
}

/// Oriented 3D box resting upright in the ego frame.
///
/// `l` runs along the heading, `w` across it and `h` vertically. In the ego
/// frame `yaw` is the heading about +z measured from +x. For camera-frame
/// boxes the center is in camera coordinates and `yaw` is the ego heading
/// minus the camera's pose yaw, so `to_ego` only has to add the pose yaw back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3D {
    pub frame: Frame,
    pub center: [f64; 3],
    pub w: f64,
    pub h: f64,
    pub l: f64,
    pub yaw: f64,
    pub class: ObjectClass,
    pub score: f64,
    pub sigma: f64,
}

impl Box3D {
    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0 && self.h > 0.0 && self.l > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "box dimensions must be positive, got w={} h={} l={}",
                self.w, self.h, self.l
            )));
        }
        if !self.center.iter().chain([&self.yaw, &self.score, &self.sigma]).all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite box field".into()));
        }
        if !(0.0..=1.0).contains(&self.score) || self.sigma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "score must lie in [0, 1] and sigma be non-negative, got {} / {}",
                self.score, self.sigma
            )));
        }
        Ok(())
    }

    pub fn cam_center(&self) -> CamPoint3 {
        CamPoint3::new(self.center[0], self.center[1], self.center[2])
    }

    pub fn ego_center(&self) -> EgoPoint3 {
        EgoPoint3::new(self.center[0], self.center[1], self.center[2])
    }

    /// The eight ego-frame corners of an ego-frame box: bottom face first,
    /// counter-clockwise from the front-left corner.
    pub fn ego_corners(&self) -> [EgoPoint3; 8] {
        let (s, c) = self.yaw.sin_cos();
        let (hl, hw, hh) = (0.5 * self.l, 0.5 * self.w, 0.5 * self.h);
        let footprint = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)];
        let mut out = [EgoPoint3::default(); 8];
        for (k, dz) in [-hh, hh].into_iter().enumerate() {
            for (j, (dx, dy)) in footprint.iter().enumerate() {
                out[4 * k + j] = EgoPoint3::new(
                    self.center[0] + c * dx - s * dy,
                    self.center[1] + s * dx + c * dy,
                    self.center[2] + dz,
                );
            }
        }
        out
    }

    /// Camera-frame box re-expressed in the ego frame.
    pub fn to_ego(&self, pose: &ExtrinsicPose) -> Box3D {
        match self.frame {
            Frame::Ego => *self,
            Frame::Camera => {
                let c = pose.cam_to_ego(self.cam_center());
                Box3D {
                    frame: Frame::Ego,
                    center: [c.x, c.y, c.z],
                    yaw: wrap_angle(self.yaw + pose.yaw),
                    ..*self
                }
            }
        }
    }

    /// Ego-frame box re-expressed in a camera frame.
    pub fn to_camera(&self, pose: &ExtrinsicPose) -> Box3D {
        match self.frame {
            Frame::Camera => *self,
            Frame::Ego => {
                let c = pose.ego_to_cam(self.ego_center());
                Box3D {
                    frame: Frame::Camera,
                    center: [c.x, c.y, c.z],
                    yaw: wrap_angle(self.yaw - pose.yaw),
                    ..*self
                }
            }
        }
    }

    /// The eight corners in the camera frame of a camera-frame box.
    pub fn cam_corners(&self, pose: &ExtrinsicPose) -> [CamPoint3; 8] {
        self.to_ego(pose).ego_corners().map(|p| pose.ego_to_cam(p))
    }
}

/// Axis-aligned image box given by its center and size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2D {
    pub u: f64,
    pub v: f64,
    pub width: f64,
    pub height: f64,
}

impl Box2D {
    pub fn from_corners(u0: f64, v0: f64, u1: f64, v1: f64) -> Self {
        Self {
            u: 0.5 * (u0 + u1),
            v: 0.5 * (v0 + v1),
            width: u1 - u0,
            height: v1 - v0,
        }
    }

    pub fn min_u(&self) -> f64 {
        self.u - 0.5 * self.width
    }
    pub fn max_u(&self) -> f64 {
        self.u + 0.5 * self.width
    }
    pub fn min_v(&self) -> f64 {
        self.v - 0.5 * self.height
    }
    pub fn max_v(&self) -> f64 {
        self.v + 0.5 * self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
        assert_eq!(wrap_angle(0.25), 0.25);
        for i in -100..100 {
            let w = wrap_angle(i as f64 * 0.37);
            assert!(w > -PI && w <= PI);
        }
    }

    #[test]
    fn class_names_round_trip() {
        for c in ObjectClass::ALL {
            assert_eq!(c.as_str().parse::<ObjectClass>().unwrap(), c);
            assert_eq!(ObjectClass::from_index(c.index()), Some(c));
        }
        assert!("bus".parse::<ObjectClass>().is_err());
    }

    #[test]
    fn camera_ego_round_trip() {
        let pose = ExtrinsicPose { x: -1.9, y: 1.0, z: 1.0, pitch: 0.05, yaw: 0.1, roll: -2.2 };
        let b = Box3D {
            frame: Frame::Ego,
            center: [3.0, 4.0, 0.8],
            w: 1.8,
            h: 1.5,
            l: 4.5,
            yaw: 2.9,
            class: ObjectClass::Car,
            score: 1.0,
            sigma: 0.0,
        };
        let back = b.to_camera(&pose).to_ego(&pose);
        for k in 0..3 {
            assert!((back.center[k] - b.center[k]).abs() < 1e-12);
        }
        assert!((back.yaw - b.yaw).abs() < 1e-12);
        let cam = b.to_camera(&pose);
        let via_cam = cam.cam_corners(&pose).map(|p| pose.cam_to_ego(p));
        for (p, q) in via_cam.iter().zip(b.ego_corners()) {
            assert!((p.x - q.x).abs() < 1e-12 && (p.y - q.y).abs() < 1e-12 && (p.z - q.z).abs() < 1e-12);
        }
    }
}
