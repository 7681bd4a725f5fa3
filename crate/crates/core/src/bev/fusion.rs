use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codec::{Box3D, Frame, ObjectClass};
use crate::error::{Error, Result};
use crate::eval::iou_bev;
use crate::geometry::{CameraId, ExtrinsicPose};

/// Ground-plane footprint of a detection in the ego frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BevBox {
    pub x: f64,
    pub y: f64,
    pub l: f64,
    pub w: f64,
    pub yaw: f64,
    pub class: ObjectClass,
    pub score: f64,
    pub source_camera: Option<CameraId>,
}

impl BevBox {
    /// Footprint corners, counter-clockwise, starting front-left.
    pub fn corners(&self) -> [[f64; 2]; 4] {
        let (s, c) = self.yaw.sin_cos();
        let (hl, hw) = (0.5 * self.l, 0.5 * self.w);
        [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)].map(|(dx, dy)| [self.x + c * dx - s * dy, self.y + s * dx + c * dy])
    }

    pub fn area(&self) -> f64 {
        self.l * self.w
    }
}

/// Re-expresses a camera-frame box in the ego frame.
pub fn to_ego(b: &Box3D, pose: &ExtrinsicPose) -> Box3D {
    b.to_ego(pose)
}

/// Drops height and z, keeping the ground-plane footprint.
pub fn to_bev(b: &Box3D, source_camera: Option<CameraId>) -> BevBox {
    debug_assert_eq!(b.frame, Frame::Ego, "BEV projection expects ego-frame boxes");
    BevBox {
        x: b.center[0],
        y: b.center[1],
        l: b.l,
        w: b.w,
        yaw: b.yaw,
        class: b.class,
        score: b.score,
        source_camera,
    }
}

/// Camera-frame detections from the four cameras at one instant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SurroundFrame {
    pub frame_id: u64,
    pub timestamp: f64,
    pub detections: BTreeMap<CameraId, Vec<Box3D>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    /// Suppress when the BEV IoU with a kept box exceeds this.
    pub iou_threshold: f64,
    /// Suppress when the center distance to a kept box is below this (meters).
    pub center_dist_threshold: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.3,
            center_dist_threshold: 0.5,
        }
    }
}

fn camera_rank(c: Option<CameraId>) -> usize {
    c.map_or(CameraId::ALL.len(), |id| id as usize)
}

/// Score-greedy same-class suppression in the BEV plane. Equal scores are
/// ordered by source camera (front, left, right, rear, none) and then by
/// input position, so the result is deterministic. Output is in keep order.
pub fn fuse_bev(boxes: &[BevBox], config: &FusionConfig) -> Vec<BevBox> {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| {
        boxes[b]
            .score
            .total_cmp(&boxes[a].score)
            .then(camera_rank(boxes[a].source_camera).cmp(&camera_rank(boxes[b].source_camera)))
            .then(a.cmp(&b))
    });
    let mut kept: Vec<BevBox> = Vec::new();
    for i in order {
        let candidate = &boxes[i];
        let suppressed = kept.iter().any(|k| {
            k.class == candidate.class
                && ((k.x - candidate.x).hypot(k.y - candidate.y) < config.center_dist_threshold
                    || iou_bev(k, candidate) > config.iou_threshold)
        });
        if !suppressed {
            kept.push(*candidate);
        }
    }
    kept
}

/// Moves every camera's detections into the ego BEV plane and fuses them.
pub fn fuse_surround(
    frame: &SurroundFrame,
    poses: &BTreeMap<CameraId, ExtrinsicPose>,
    config: &FusionConfig,
) -> Result<Vec<BevBox>> {
    let mut all = Vec::new();
    for (id, dets) in &frame.detections {
        let pose = poses.get(id).ok_or_else(|| Error::UnknownCamera(id.to_string()))?;
        all.extend(dets.iter().map(|d| to_bev(&to_ego(d, pose), Some(*id))));
    }
    Ok(fuse_bev(&all, config))
}
