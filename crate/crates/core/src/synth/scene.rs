use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bev::{to_bev, BevBox};
use crate::codec::{Box2D, Box3D, Frame, GridSpec, ObjectClass, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::eval::{bev_intersection_area, VISIBLE_RANGE_M};
use crate::geometry::{CamPoint3, CameraId, CameraModel, EgoPoint3, InverseMode, Pixel, Rig};
use crate::synth::rig::EGO_FOOTPRINT;

/// Nominal `[w, h, l]` in meters for each class, in class-index order.
pub const DIMENSION_PRIORS: [[f64; 3]; NUM_CLASSES] = [
    [1.8, 1.5, 4.5], // car
    [2.4, 3.0, 7.0], // truck
    [0.6, 1.7, 0.6], // pedestrian
    [0.7, 1.7, 1.8], // rider
    [0.6, 1.0, 0.9], // baby carriage
    [0.4, 0.7, 0.4], // traffic cone
    [0.8, 1.4, 2.0], // motorbike
    [0.4, 1.2, 0.6], // no-stop sign
];

/// Parameters of a randomized parking-lot scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    /// Inclusive range for the number of objects to attempt.
    pub n_objects: (usize, usize),
    /// Relative class frequencies, indexed like [`ObjectClass::ALL`].
    pub class_weights: [f64; NUM_CLASSES],
    /// Planar distance from the ego origin, meters.
    pub min_range: f64,
    pub max_range: f64,
    /// Headings are drawn uniformly from `[yaw_range.0, yaw_range.1)`.
    pub yaw_range: (f64, f64),
    /// Nominal `[w, h, l]` per class.
    pub dimension_priors: [[f64; 3]; NUM_CLASSES],
    /// Each dimension is scaled by a uniform factor in `1 +- dimension_jitter`.
    pub dimension_jitter: f64,
    /// Reject placements whose footprints overlap.
    pub occlusion_free: bool,
    /// Snap each object so its projected center sits on a cell center of
    /// this downsampling factor in its owning camera. `None` disables it.
    pub snap_downsample: Option<u32>,
    /// Keep objects' 8 corners at least this far in front of the camera (camera z, meters).
    pub min_corner_depth: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        use std::f64::consts::PI;
        let mut class_weights = [1.0; NUM_CLASSES];
        class_weights[ObjectClass::Car.index()] = 4.0;
        Self {
            seed: 0,
            n_objects: (4, 12),
            class_weights,
            min_range: 1.0,
            max_range: 14.0,
            yaw_range: (-PI, PI),
            dimension_priors: DIMENSION_PRIORS,
            dimension_jitter: 0.1,
            occlusion_free: true,
            snap_downsample: Some(8),
            min_corner_depth: 0.1,
        }
    }
}

impl SceneSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.n_objects.0 > self.n_objects.1 {
            return bad("n_objects range is reversed");
        }
        if !(self.max_range > 0.0 && self.max_range <= VISIBLE_RANGE_M) {
            return bad("max_range must lie in (0, 15] m");
        }
        if !(self.min_range >= 0.0 && self.min_range < self.max_range) {
            return bad("min_range must be non-negative and below max_range");
        }
        if !(self.yaw_range.0 < self.yaw_range.1) || !self.yaw_range.0.is_finite() || !self.yaw_range.1.is_finite() {
            return bad("yaw_range must be a finite, non-empty interval");
        }
        if self.class_weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || self.class_weights.iter().sum::<f64>() <= 0.0 {
            return bad("class weights must be non-negative with a positive sum");
        }
        if self.dimension_priors.iter().flatten().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return bad("dimension priors must be positive");
        }
        if !(0.0..1.0).contains(&self.dimension_jitter) {
            return bad("dimension_jitter must lie in [0, 1)");
        }
        if let Some(ds) = self.snap_downsample {
            if !matches!(ds, 4 | 8) {
                return bad("snap downsample must be 4 or 8");
            }
        }
        if !(self.min_corner_depth > 0.0) {
            return bad("min_corner_depth must be positive");
        }
        Ok(())
    }
}

/// Labels of one camera: camera-frame boxes, their 2D rectangles and the
/// index of each in [`Scene::objects`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CameraLabels {
    pub boxes: Vec<Box3D>,
    pub boxes2d: Vec<Box2D>,
    pub object_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub seed: u64,
    /// Ground truth in the ego frame.
    pub objects: Vec<Box3D>,
    /// Camera that labels each object.
    pub owners: Vec<CameraId>,
    pub labels: BTreeMap<CameraId, CameraLabels>,
}

impl Scene {
    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }
}

/// Axis-aligned rectangle around the projections of a box's 8 corners.
/// Fails if any corner cannot be projected.
pub fn corner_rectangle(ego_box: &Box3D, camera: &CameraModel) -> Result<Box2D> {
    let pose = camera.pose();
    let (mut u0, mut v0, mut u1, mut v1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for corner in ego_box.ego_corners() {
        let px = camera.project(pose.ego_to_cam(corner))?;
        u0 = u0.min(px.u);
        v0 = v0.min(px.v);
        u1 = u1.max(px.u);
        v1 = v1.max(px.v);
    }
    Ok(Box2D::from_corners(u0, v0, u1, v1))
}

/// Checks one camera can label the box; returns the center's field angle.
fn visibility(ego_box: &Box3D, camera: &CameraModel, min_corner_depth: f64) -> Option<f64> {
    let pose = camera.pose();
    let center = pose.ego_to_cam(ego_box.ego_center());
    let px = camera.project(center).ok()?;
    if !camera.contains(px) {
        return None;
    }
    let corners_ok = ego_box.ego_corners().iter().all(|&c| {
        let p = pose.ego_to_cam(c);
        p.z >= min_corner_depth && camera.project(p).is_ok()
    });
    corners_ok.then(|| center.field_angle())
}

/// Moves a box along its camera's image plane (at constant camera depth)
/// so its projected center lands on the nearest cell center.
fn snap_to_cell(ego_box: &Box3D, camera: &CameraModel, downsample: u32) -> Option<Box3D> {
    let pose = camera.pose();
    let grid = GridSpec::for_camera(camera, downsample).ok()?;
    let center = pose.ego_to_cam(ego_box.ego_center());
    let (row, col) = grid.cell_of(camera.project(center).ok()?)?;
    let target: Pixel = grid.cell_center(row, col);
    let snapped: CamPoint3 = camera.unproject(target, center.z, InverseMode::Exact).ok()?;
    let e: EgoPoint3 = pose.cam_to_ego(snapped);
    Some(Box3D {
        center: [e.x, e.y, e.z],
        ..*ego_box
    })
}

fn ego_body() -> BevBox {
    let [x0, x1, y0, y1] = EGO_FOOTPRINT;
    BevBox {
        x: 0.5 * (x0 + x1),
        y: 0.5 * (y0 + y1),
        l: x1 - x0 + 0.6,
        w: y1 - y0 + 0.6,
        yaw: 0.0,
        class: ObjectClass::Car,
        score: 1.0,
        source_camera: None,
    }
}

const ATTEMPTS_PER_OBJECT: usize = 200;

/// Draws a scene. Each object is owned by the camera that sees its center
/// closest to the optical axis, and is labelled in that camera only.
/// Placements that overlap the ego body, another object (when
/// occlusion-free), or another object's center cell are redrawn, up to a
/// fixed number of attempts; the scene may then hold fewer objects than drawn.
pub fn generate(spec: &SceneSpec, rig: &Rig) -> Result<Scene> {
    spec.validate()?;
    if rig.is_empty() {
        return Err(Error::InvalidArgument("rig has no cameras".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let classes = WeightedIndex::new(spec.class_weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let n = rng.random_range(spec.n_objects.0..=spec.n_objects.1);

    let body = ego_body();
    let mut objects: Vec<Box3D> = Vec::new();
    let mut owners: Vec<CameraId> = Vec::new();
    let mut cells: Vec<(CameraId, (usize, usize))> = Vec::new();

    for _ in 0..n {
        for _ in 0..ATTEMPTS_PER_OBJECT {
            let class = ObjectClass::ALL[classes.sample(&mut rng)];
            let prior = spec.dimension_priors[class.index()];
            let dims: Vec<f64> = prior
                .iter()
                .map(|d| d * (1.0 + spec.dimension_jitter * rng.random_range(-1.0..=1.0)))
                .collect();
            let range = rng.random_range(spec.min_range..spec.max_range);
            let bearing = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let yaw = rng.random_range(spec.yaw_range.0..spec.yaw_range.1);
            let candidate = Box3D {
                frame: Frame::Ego,
                center: [range * bearing.cos(), range * bearing.sin(), 0.5 * dims[1]],
                w: dims[0],
                h: dims[1],
                l: dims[2],
                yaw: crate::codec::wrap_angle(yaw),
                class,
                score: 1.0,
                sigma: 0.0,
            };
            if let Some((obj, owner, cell)) = place(&candidate, spec, rig, &body, &objects, &cells) {
                objects.push(obj);
                owners.push(owner);
                cells.push((owner, cell));
                break;
            }
        }
    }

    let mut labels: BTreeMap<CameraId, CameraLabels> = rig.ids().map(|id| (id, CameraLabels::default())).collect();
    for (i, (obj, owner)) in objects.iter().zip(&owners).enumerate() {
        let camera = rig.get(*owner)?;
        let entry = labels.get_mut(owner).expect("labels hold every rig camera");
        entry.boxes.push(obj.to_camera(camera.pose()));
        entry.boxes2d.push(corner_rectangle(obj, camera)?);
        entry.object_ids.push(i);
    }
    Ok(Scene {
        seed: spec.seed,
        objects,
        owners,
        labels,
    })
}

fn place(
    candidate: &Box3D,
    spec: &SceneSpec,
    rig: &Rig,
    body: &BevBox,
    objects: &[Box3D],
    cells: &[(CameraId, (usize, usize))],
) -> Option<(Box3D, CameraId, (usize, usize))> {
    let (owner, _) = rig
        .iter()
        .filter_map(|(id, cam)| visibility(candidate, cam, spec.min_corner_depth).map(|theta| (id, theta)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let camera = rig.get(owner).ok()?;
    let obj = match spec.snap_downsample {
        Some(ds) => snap_to_cell(candidate, camera, ds)?,
        None => *candidate,
    };
    visibility(&obj, camera, spec.min_corner_depth)?;
    if obj.center[0].hypot(obj.center[1]) > spec.max_range {
        return None;
    }
    let footprint = to_bev(&obj, None);
    if bev_intersection_area(&footprint, body) > 0.0 {
        return None;
    }
    if spec.occlusion_free && objects.iter().any(|o| bev_intersection_area(&footprint, &to_bev(o, None)) > 0.0) {
        return None;
    }
    // Occupancy is tracked on the snapping grid (the 4-pixel grid when not
    // snapping). A cell there never shares a finer cell with another.
    let grid = GridSpec::for_camera(camera, spec.snap_downsample.unwrap_or(4)).ok()?;
    let cell = grid.cell_of(camera.project(camera.pose().ego_to_cam(obj.ego_center())).ok()?)?;
    if cells.iter().any(|&(id, c)| id == owner && c == cell) {
        return None;
    }
    Some((obj, owner, cell))
}
