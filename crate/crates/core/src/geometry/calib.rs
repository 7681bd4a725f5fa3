//! Rig calibration file (JSON, `format_version: 1`).
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "cameras": {
//!     "front": { "image_width": 640, "image_height": 480,
//!                "f_u": 186.7, "f_v": 309.0, "c_u": 320.0, "c_v": 242.8,
//!                "k1": -0.05, "k2": 0.01, "k3": -0.002, "k4": 0.0001,
//!                "x": 0.0, "y": 0.0, "z": 0.7,
//!                "pitch": 0.0, "yaw": -1.5708, "roll": -1.87 }
//!   }
//! }
//! ```
//!
//! Angles are radians, translations meters in the ego frame. Rotation
//! convention: `R = Rz(yaw) * Ry(pitch) * Rx(roll)` mapping camera axes
//! (x right, y down, z forward) into ego axes (x forward, y left, z up).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CameraModel, DistortionCoeffs, ExtrinsicPose, Intrinsics};

pub const CALIBRATION_FORMAT_VERSION: u32 = 1;

/// Surround-view camera position. The declaration order is the fusion
/// tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CameraId {
    Front,
    Left,
    Right,
    Rear,
}

impl CameraId {
    pub const ALL: [CameraId; 4] = [CameraId::Front, CameraId::Left, CameraId::Right, CameraId::Rear];

    pub fn as_str(&self) -> &'static str {
        match self {
            CameraId::Front => "front",
            CameraId::Left => "left",
            CameraId::Right => "right",
            CameraId::Rear => "rear",
        }
    }
}

impl fmt::Display for CameraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CameraId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "front" => Ok(CameraId::Front),
            "left" => Ok(CameraId::Left),
            "right" => Ok(CameraId::Right),
            "rear" => Ok(CameraId::Rear),
            other => Err(Error::UnknownCamera(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraRecord {
    image_width: u32,
    image_height: u32,
    f_u: f64,
    f_v: f64,
    c_u: f64,
    c_v: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    k4: f64,
    x: f64,
    y: f64,
    z: f64,
    pitch: f64,
    yaw: f64,
    roll: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationDoc {
    format_version: u32,
    cameras: BTreeMap<String, CameraRecord>,
}

impl CameraRecord {
    fn from_model(cam: &CameraModel) -> Self {
        let k = cam.intrinsics();
        let d = cam.distortion();
        let p = cam.pose();
        Self {
            image_width: cam.image_width(),
            image_height: cam.image_height(),
            f_u: k.f_u,
            f_v: k.f_v,
            c_u: k.c_u,
            c_v: k.c_v,
            k1: d.k1,
            k2: d.k2,
            k3: d.k3,
            k4: d.k4,
            x: p.x,
            y: p.y,
            z: p.z,
            pitch: p.pitch,
            yaw: p.yaw,
            roll: p.roll,
        }
    }

    fn into_model(self, id: CameraId) -> Result<CameraModel> {
        let values = [
            self.f_u, self.f_v, self.c_u, self.c_v, self.k1, self.k2, self.k3, self.k4, self.x, self.y, self.z,
            self.pitch, self.yaw, self.roll,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Calibration(format!("camera `{id}` has a non-finite value")));
        }
        CameraModel::new(
            Intrinsics::new(self.f_u, self.f_v, self.c_u, self.c_v),
            DistortionCoeffs::new(self.k1, self.k2, self.k3, self.k4),
            ExtrinsicPose {
                x: self.x,
                y: self.y,
                z: self.z,
                pitch: self.pitch,
                yaw: self.yaw,
                roll: self.roll,
            },
            self.image_width,
            self.image_height,
        )
    }
}

/// A set of calibrated cameras keyed by position.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rig {
    cameras: BTreeMap<CameraId, CameraModel>,
}

impl Rig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: CameraId, camera: CameraModel) {
        self.cameras.insert(id, camera);
    }

    pub fn get(&self, id: CameraId) -> Result<&CameraModel> {
        self.cameras.get(&id).ok_or_else(|| Error::UnknownCamera(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (CameraId, &CameraModel)> {
        self.cameras.iter().map(|(id, cam)| (*id, cam))
    }

    pub fn ids(&self) -> impl Iterator<Item = CameraId> + '_ {
        self.cameras.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }

    pub fn poses(&self) -> BTreeMap<CameraId, ExtrinsicPose> {
        self.cameras.iter().map(|(id, cam)| (*id, *cam.pose())).collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: CalibrationDoc =
            serde_json::from_str(text).map_err(|e| Error::Calibration(e.to_string()))?;
        if doc.format_version != CALIBRATION_FORMAT_VERSION {
            return Err(Error::Calibration(format!(
                "unsupported format_version {} (expected {CALIBRATION_FORMAT_VERSION})",
                doc.format_version
            )));
        }
        let mut rig = Rig::new();
        for (name, record) in doc.cameras {
            let id: CameraId = name.parse().map_err(|_| Error::Calibration(format!("unknown camera id `{name}`")))?;
            rig.insert(id, record.into_model(id)?);
        }
        Ok(rig)
    }

    pub fn to_json_string(&self) -> String {
        let doc = CalibrationDoc {
            format_version: CALIBRATION_FORMAT_VERSION,
            cameras: self
                .cameras
                .iter()
                .map(|(id, cam)| (id.to_string(), CameraRecord::from_model(cam)))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("calibration serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}
