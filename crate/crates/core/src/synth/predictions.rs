use std::collections::BTreeMap;

use ndarray::{Array2, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::codec::{encode_scene, DepthPair, GridSpec, MultiBinCodec, TargetMaps};
use crate::error::{Error, Result};
use crate::geometry::{CamPoint3, CameraId, CameraModel, InverseMode, Rig};
use crate::synth::Scene;

/// Seeded Gaussian perturbations applied to the object cells of ideal
/// predictions. Standard deviations of zero leave a channel untouched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub seed: u64,
    /// Depth, meters.
    pub depth: f64,
    /// Each of w, h, l, meters.
    pub dims: f64,
    /// 2D center offset, grid cells.
    pub offset: f64,
    /// Heading residual, radians.
    pub yaw: f64,
}

impl NoiseSpec {
    pub fn depth_only(seed: u64, depth: f64) -> Self {
        Self {
            seed,
            depth,
            dims: 0.0,
            offset: 0.0,
            yaw: 0.0,
        }
    }
}

/// Smallest value a perturbed depth or dimension may take.
const MIN_POSITIVE: f64 = 0.05;

/// Per-camera prediction maps that a perfect network would output: the
/// encoded targets with zero depth uncertainty, so every score is the
/// heatmap peak. Cameras without labels still get (empty) maps.
pub fn perfect_predictions(
    scene: &Scene,
    rig: &Rig,
    downsample: u32,
    codec: &MultiBinCodec,
    noise: Option<&NoiseSpec>,
) -> Result<BTreeMap<CameraId, TargetMaps>> {
    let mut rng = noise.map(|n| ChaCha8Rng::seed_from_u64(n.seed));
    let mut out = BTreeMap::new();
    for (id, camera) in rig.iter() {
        let grid = GridSpec::for_camera(camera, downsample)?;
        let mut maps = match scene.labels.get(&id) {
            Some(labels) => {
                let outcome = encode_scene(&labels.boxes, &labels.boxes2d, camera, grid, codec)?;
                if let Some((i, reason)) = outcome.skipped.first() {
                    return Err(Error::InvalidArgument(format!(
                        "{id} label {i} cannot be encoded at downsample {downsample}: {reason:?}"
                    )));
                }
                outcome.maps
            }
            None => TargetMaps::zeros(grid, codec.n_bins()),
        };
        maps.log_sigma.fill(f64::NEG_INFINITY);
        if let (Some(spec), Some(rng)) = (noise, rng.as_mut()) {
            perturb(&mut maps, spec, rng)?;
        }
        out.insert(id, maps);
    }
    Ok(out)
}

fn gaussian(std: f64) -> Result<Option<Normal<f64>>> {
    if std == 0.0 {
        return Ok(None);
    }
    Normal::new(0.0, std)
        .map(Some)
        .map_err(|e| Error::InvalidArgument(format!("noise standard deviation {std}: {e}")))
}

fn perturb(maps: &mut TargetMaps, spec: &NoiseSpec, rng: &mut ChaCha8Rng) -> Result<()> {
    let depth = gaussian(spec.depth)?;
    let dims = gaussian(spec.dims)?;
    let offset = gaussian(spec.offset)?;
    let yaw = gaussian(spec.yaw)?;
    let bins = maps.bin_indices();
    let (h, w) = maps.depth.dim();
    for r in 0..h {
        for c in 0..w {
            if !maps.valid_mask[[r, c]] {
                continue;
            }
            if let Some(n) = &depth {
                let d = &mut maps.depth[[r, c]];
                *d = (*d + n.sample(rng)).max(MIN_POSITIVE);
            }
            if let Some(n) = &dims {
                for k in 0..3 {
                    let d = &mut maps.size_3d[[k, r, c]];
                    *d = (*d + n.sample(rng)).max(MIN_POSITIVE);
                }
            }
            if let Some(n) = &offset {
                for k in 0..2 {
                    maps.offset_2d[[k, r, c]] += n.sample(rng);
                }
            }
            if let Some(n) = &yaw {
                maps.bin_residual[[bins[[r, c]], r, c]] += n.sample(rng);
            }
        }
    }
    Ok(())
}

/// Ground depth seen by each cell center of `grid`: camera z of the point
/// where the pixel ray meets the ground plane (ego z = 0), valid when the
/// ray points down and the hit lies within `max_range` of the ego origin.
pub fn render_ground_depth(camera: &CameraModel, grid: GridSpec, max_range: f64) -> (Array2<f64>, Array2<bool>) {
    let pose = camera.pose();
    let origin = pose.cam_to_ego(CamPoint3::new(0.0, 0.0, 0.0));
    let mut depth = Array2::zeros((grid.height, grid.width));
    let mut valid = Array2::from_elem((grid.height, grid.width), false);
    Zip::indexed(&mut depth).and(&mut valid).for_each(|(r, c), d, m| {
        let px = grid.cell_center(r, c);
        if !camera.contains(px) {
            return;
        }
        // Ray through the pixel at unit camera depth.
        let Ok(ray) = camera.unproject(px, 1.0, InverseMode::Exact) else {
            return;
        };
        let tip = pose.cam_to_ego(ray);
        let dz = tip.z - origin.z;
        if !(dz < 0.0) {
            return;
        }
        let s = -origin.z / dz;
        let hit = [origin.x + s * (tip.x - origin.x), origin.y + s * (tip.y - origin.y)];
        if s.is_finite() && hit[0].hypot(hit[1]) <= max_range {
            *d = s;
            *m = true;
        }
    });
    (depth, valid)
}

/// Ground-depth truth for one camera and a prediction of it: an exact copy,
/// or with seeded Gaussian depth noise on the valid cells.
pub fn depth_pair(camera: &CameraModel, grid: GridSpec, max_range: f64, noise: Option<&NoiseSpec>) -> Result<DepthPair> {
    let (gt, valid) = render_ground_depth(camera, grid, max_range);
    let mut pred = gt.clone();
    if let Some(spec) = noise {
        if let Some(n) = gaussian(spec.depth)? {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            Zip::from(&mut pred).and(&valid).for_each(|d, &m| {
                if m {
                    *d = (*d + n.sample(&mut rng)).max(MIN_POSITIVE);
                }
            });
        }
    }
    Ok(DepthPair { pred, gt, valid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{decode, DecodeConfig};
    use crate::synth::{generate, RigSpec, SceneSpec};

    #[test]
    fn noise_free_scores_are_one() {
        let rig = RigSpec::fixture().build().unwrap();
        let scene = generate(&SceneSpec::with_seed(3), &rig).unwrap();
        let codec = MultiBinCodec::new(2).unwrap();
        let preds = perfect_predictions(&scene, &rig, 8, &codec, None).unwrap();
        let mut total = 0;
        for (id, maps) in &preds {
            let out = decode(maps, rig.get(*id).unwrap(), &codec, &DecodeConfig::default()).unwrap();
            assert!(out.detections.iter().all(|d| d.box3d.score == 1.0 && d.box3d.sigma == 0.0));
            total += out.detections.len();
        }
        assert_eq!(total, scene.num_objects());
    }

    #[test]
    fn noise_is_seeded_and_confined_to_objects() {
        let rig = RigSpec::fixture().build().unwrap();
        let scene = generate(&SceneSpec::with_seed(4), &rig).unwrap();
        let codec = MultiBinCodec::new(2).unwrap();
        let spec = NoiseSpec { seed: 1, depth: 0.5, dims: 0.1, offset: 0.2, yaw: 0.05 };
        let a = perfect_predictions(&scene, &rig, 8, &codec, Some(&spec)).unwrap();
        let b = perfect_predictions(&scene, &rig, 8, &codec, Some(&spec)).unwrap();
        assert_eq!(a, b);
        let clean = perfect_predictions(&scene, &rig, 8, &codec, None).unwrap();
        for (id, maps) in &a {
            let base = &clean[id];
            Zip::from(&maps.depth).and(&base.depth).and(&maps.valid_mask).for_each(|&n, &c, &m| {
                if !m {
                    assert_eq!(n, c);
                }
            });
            assert_eq!(maps.heatmap, base.heatmap);
        }
    }

    #[test]
    fn ground_depth_matches_flat_ground() {
        let rig = RigSpec::fixture().build().unwrap();
        let cam = rig.get(CameraId::Front).unwrap();
        let grid = GridSpec::for_camera(cam, 8).unwrap();
        let (depth, valid) = render_ground_depth(cam, grid, 30.0);
        assert!(valid.iter().any(|&m| m));
        for ((r, c), &m) in valid.indexed_iter() {
            if m {
                let p = cam.unproject(grid.cell_center(r, c), depth[[r, c]], InverseMode::Exact).unwrap();
                assert!(cam.pose().cam_to_ego(p).z.abs() < 1e-9);
            }
        }
    }
}
