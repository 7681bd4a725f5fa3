//! Predicted maps to scored detections.

use ndarray::{s, Axis};

use crate::codec::heatmap::local_maxima;
use crate::codec::targets::argmax;
use crate::codec::{Box2D, Box3D, Frame, MultiBinCodec, ObjectClass, TargetMaps};
use crate::error::Result;
use crate::geometry::{CameraModel, InverseMode};

pub const DEFAULT_TOP_K: usize = 100;
pub const DEFAULT_SCORE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeConfig {
    /// Peaks kept per class.
    pub top_k: usize,
    /// Minimum final (uncertainty-weighted) score.
    pub score_threshold: f64,
    pub mode: InverseMode,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            top_k: DEFAULT_TOP_K,
            score_threshold: DEFAULT_SCORE_THRESHOLD,
            mode: InverseMode::Lut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// Camera-frame box.
    pub box3d: Box3D,
    pub box2d: Box2D,
    /// Raw heatmap value at the peak.
    pub peak: f64,
    pub cell: (usize, usize),
}

/// A peak that could not be turned into a detection.
#[derive(Debug, Clone, PartialEq)]
pub struct Dropped {
    pub class: ObjectClass,
    pub cell: (usize, usize),
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecodeOutput {
    /// Sorted by score, highest first.
    pub detections: Vec<Detection>,
    pub dropped: Vec<Dropped>,
}

/// Object confidence: heatmap peak damped by the depth uncertainty,
/// `peak * exp(-sigma)`.
#[inline]
pub fn object_confidence(peak: f64, sigma: f64) -> f64 {
    peak * (-sigma).exp()
}

/// Extracts local heatmap maxima, keeps the `top_k` strongest per class and
/// lifts each into a camera-frame 3D box through the fisheye inverse.
pub fn decode(
    maps: &TargetMaps,
    camera: &CameraModel,
    codec: &MultiBinCodec,
    config: &DecodeConfig,
) -> Result<DecodeOutput> {
    maps.validate()?;
    if maps.n_bins() != codec.n_bins() {
        return Err(crate::Error::ShapeMismatch {
            expected: vec![codec.n_bins()],
            found: vec![maps.n_bins()],
        });
    }
    let grid = maps.grid();
    let ds = grid.downsample as f64;
    let mut out = DecodeOutput::default();

    for (class_idx, channel) in maps.heatmap.axis_iter(Axis(0)).enumerate() {
        let class = ObjectClass::from_index(class_idx).expect("heatmap has one channel per class");
        let mut candidates: Vec<(f64, usize, usize, f64)> = local_maxima(channel, 0.0)
            .into_iter()
            .map(|(r, c, peak)| {
                let sigma = maps.log_sigma[[r, c]].exp();
                (object_confidence(peak, sigma), r, c, peak)
            })
            .filter(|(score, ..)| *score >= config.score_threshold)
            .collect();
        // Stable sort keeps row-major order among equal scores.
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
        candidates.truncate(config.top_k);

        for (score, r, c, peak) in candidates {
            let drop = |reason: String| Dropped {
                class,
                cell: (r, c),
                reason,
            };
            let depth = maps.depth[[r, c]];
            let pixel = grid.cell_center(r, c);
            let center = match camera.unproject(pixel, depth, config.mode) {
                Ok(p) => p,
                Err(e) => {
                    out.dropped.push(drop(e.to_string()));
                    continue;
                }
            };
            let (w, h, l) = (maps.size_3d[[0, r, c]], maps.size_3d[[1, r, c]], maps.size_3d[[2, r, c]]);
            if !(w > 0.0 && h > 0.0 && l > 0.0) {
                out.dropped.push(drop(format!("non-positive dimensions ({w}, {h}, {l})")));
                continue;
            }
            let bin = argmax(maps.bin_logits.slice(s![.., r, c]).iter().copied());
            let yaw = codec.decode(bin, maps.bin_residual[[bin, r, c]]);
            let box3d = Box3D {
                frame: Frame::Camera,
                center: [center.x, center.y, center.z],
                w,
                h,
                l,
                yaw,
                class,
                score,
                sigma: maps.log_sigma[[r, c]].exp(),
            };
            let box2d = Box2D {
                u: pixel.u + maps.offset_2d[[0, r, c]] * ds,
                v: pixel.v + maps.offset_2d[[1, r, c]] * ds,
                width: maps.size_2d[[0, r, c]],
                height: maps.size_2d[[1, r, c]],
            };
            out.detections.push(Detection {
                box3d,
                box2d,
                peak,
                cell: (r, c),
            });
        }
    }
    out.detections.sort_by(|a, b| b.box3d.score.total_cmp(&a.box3d.score));
    Ok(out)
}
