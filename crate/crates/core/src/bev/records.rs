//! Line-delimited JSON detection interchange.
//!
//! One object per line. Camera-frame records name their camera; ego-frame
//! records use `"camera": "ego"`. `box2d` is `[u, v, width, height]` and is
//! optional.
//!
//! ```text
//! {"frame":3,"camera":"front","class":"car","score":0.92,"sigma":0.1,
//!  "center":[1.2,0.4,6.3],"dims":[1.8,1.5,4.5],"yaw":0.3,"box2d":[300,250,60,40]}
//! ```

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bev::BevBox;
use crate::codec::{Box2D, Box3D, Frame, ObjectClass};
use crate::error::{Error, Result};
use crate::geometry::CameraId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sensor {
    Front,
    Left,
    Right,
    Rear,
    Ego,
}

impl Sensor {
    pub fn camera(self) -> Option<CameraId> {
        match self {
            Sensor::Front => Some(CameraId::Front),
            Sensor::Left => Some(CameraId::Left),
            Sensor::Right => Some(CameraId::Right),
            Sensor::Rear => Some(CameraId::Rear),
            Sensor::Ego => None,
        }
    }
}

impl From<CameraId> for Sensor {
    fn from(c: CameraId) -> Self {
        match c {
            CameraId::Front => Sensor::Front,
            CameraId::Left => Sensor::Left,
            CameraId::Right => Sensor::Right,
            CameraId::Rear => Sensor::Rear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionRecord {
    pub frame: u64,
    pub camera: Sensor,
    pub class: ObjectClass,
    pub score: f64,
    pub sigma: f64,
    pub center: [f64; 3],
    /// `[w, h, l]`, meters.
    pub dims: [f64; 3],
    pub yaw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box2d: Option<[f64; 4]>,
}

impl DetectionRecord {
    pub fn new(frame: u64, camera: Sensor, b: &Box3D, box2d: Option<&Box2D>) -> Self {
        Self {
            frame,
            camera,
            class: b.class,
            score: b.score,
            sigma: b.sigma,
            center: b.center,
            dims: [b.w, b.h, b.l],
            yaw: b.yaw,
            box2d: box2d.map(|b2| [b2.u, b2.v, b2.width, b2.height]),
        }
    }

    pub fn box3d(&self) -> Box3D {
        Box3D {
            frame: if self.camera == Sensor::Ego { Frame::Ego } else { Frame::Camera },
            center: self.center,
            w: self.dims[0],
            h: self.dims[1],
            l: self.dims[2],
            yaw: self.yaw,
            class: self.class,
            score: self.score,
            sigma: self.sigma,
        }
    }

    pub fn box2d(&self) -> Option<Box2D> {
        self.box2d.map(|[u, v, width, height]| Box2D { u, v, width, height })
    }

    fn validate(&self) -> Result<()> {
        self.box3d().validate()?;
        if let Some(b) = self.box2d {
            if b.iter().any(|v| !v.is_finite()) || b[2] <= 0.0 || b[3] <= 0.0 {
                return Err(Error::InvalidArgument("box2d needs finite values and positive size".into()));
            }
        }
        Ok(())
    }
}

/// Ego-frame BEV record written by the fusion step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BevRecord {
    pub frame: u64,
    pub camera: Sensor,
    pub class: ObjectClass,
    pub score: f64,
    pub center: [f64; 2],
    pub l: f64,
    pub w: f64,
    pub yaw: f64,
}

impl BevRecord {
    pub fn new(frame: u64, b: &BevBox) -> Self {
        Self {
            frame,
            camera: b.source_camera.map_or(Sensor::Ego, Sensor::from),
            class: b.class,
            score: b.score,
            center: [b.x, b.y],
            l: b.l,
            w: b.w,
            yaw: b.yaw,
        }
    }

    pub fn bev_box(&self) -> BevBox {
        BevBox {
            x: self.center[0],
            y: self.center[1],
            l: self.l,
            w: self.w,
            yaw: self.yaw,
            class: self.class,
            score: self.score,
            source_camera: self.camera.camera(),
        }
    }

    fn validate(&self) -> Result<()> {
        let vals = [self.score, self.center[0], self.center[1], self.l, self.w, self.yaw];
        if vals.iter().any(|v| !v.is_finite()) || self.l <= 0.0 || self.w <= 0.0 {
            return Err(Error::InvalidArgument("BEV record needs finite values and a positive footprint".into()));
        }
        Ok(())
    }
}

trait Validate {
    fn check(&self) -> Result<()>;
}

impl Validate for DetectionRecord {
    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl Validate for BevRecord {
    fn check(&self) -> Result<()> {
        self.validate()
    }
}

fn read_lines<T: for<'de> Deserialize<'de> + Validate>(reader: impl BufRead) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: T = serde_json::from_str(&line).map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?;
        rec.check().map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

fn write_lines<T: Serialize>(mut writer: impl Write, records: &[T]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_detections(reader: impl BufRead) -> Result<Vec<DetectionRecord>> {
    read_lines(reader)
}

pub fn write_detections(writer: impl Write, records: &[DetectionRecord]) -> Result<()> {
    write_lines(writer, records)
}

pub fn read_bev(reader: impl BufRead) -> Result<Vec<BevRecord>> {
    read_lines(reader)
}

pub fn write_bev(writer: impl Write, records: &[BevRecord]) -> Result<()> {
    write_lines(writer, records)
}
