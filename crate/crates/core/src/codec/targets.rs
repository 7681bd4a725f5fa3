//! Ground-truth target maps keyed on projected 3D box centers.

use ndarray::{s, Array2, Array3};

use crate::codec::heatmap::{draw_gaussian, gaussian_radius, GAUSSIAN_MIN_OVERLAP};
use crate::codec::{Box2D, Box3D, Frame, MultiBinCodec, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::geometry::{CameraModel, Pixel};

/// Feature-grid geometry: `height x width` cells, each `downsample` input
/// pixels on a side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub height: usize,
    pub width: usize,
    pub downsample: u32,
}

impl GridSpec {
    pub fn new(height: usize, width: usize, downsample: u32) -> Result<Self> {
        if !matches!(downsample, 4 | 8) {
            return Err(Error::InvalidArgument(format!("downsample must be 4 or 8, got {downsample}")));
        }
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument("grid dimensions must be positive".into()));
        }
        Ok(Self {
            height,
            width,
            downsample,
        })
    }

    /// Grid covering the whole image of `camera`.
    pub fn for_camera(camera: &CameraModel, downsample: u32) -> Result<Self> {
        let ds = downsample.max(1);
        Self::new(
            camera.image_height().div_ceil(ds) as usize,
            camera.image_width().div_ceil(ds) as usize,
            downsample,
        )
    }

    /// Cell `(row, col)` containing an input-image pixel, if on the grid.
    pub fn cell_of(&self, px: Pixel) -> Option<(usize, usize)> {
        let ds = self.downsample as f64;
        let (col, row) = ((px.u / ds).floor(), (px.v / ds).floor());
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some((row as usize, col as usize))
    }

    /// Input-image pixel a cell decodes to: its center.
    pub fn cell_center(&self, row: usize, col: usize) -> Pixel {
        let ds = self.downsample as f64;
        Pixel::new((col as f64 + 0.5) * ds, (row as f64 + 0.5) * ds)
    }
}

/// Dense per-camera target (or prediction) maps.
///
/// Channel semantics:
/// * `heatmap[class]`: projected-3D-center heatmap in `[0, 1]`.
/// * `offset_2d`: 2D box center minus projected 3D center, grid units.
/// * `size_2d`: 2D box width and height, input pixels.
/// * `size_3d`: box w, h, l in meters.
/// * `depth`: camera-frame z of the box center, meters.
/// * `log_sigma`: natural log of the Laplace depth-uncertainty scale.
/// * `bin_logits`, `bin_residual`: MultiBin heading, one channel per bin.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMaps {
    pub downsample: u32,
    pub heatmap: Array3<f64>,
    pub offset_2d: Array3<f64>,
    pub size_2d: Array3<f64>,
    pub size_3d: Array3<f64>,
    pub depth: Array2<f64>,
    pub log_sigma: Array2<f64>,
    pub bin_logits: Array3<f64>,
    pub bin_residual: Array3<f64>,
    pub valid_mask: Array2<bool>,
}

impl TargetMaps {
    pub fn zeros(grid: GridSpec, n_bins: usize) -> Self {
        let (h, w) = (grid.height, grid.width);
        Self {
            downsample: grid.downsample,
            heatmap: Array3::zeros((NUM_CLASSES, h, w)),
            offset_2d: Array3::zeros((2, h, w)),
            size_2d: Array3::zeros((2, h, w)),
            size_3d: Array3::zeros((3, h, w)),
            depth: Array2::zeros((h, w)),
            log_sigma: Array2::zeros((h, w)),
            bin_logits: Array3::zeros((n_bins, h, w)),
            bin_residual: Array3::zeros((n_bins, h, w)),
            valid_mask: Array2::from_elem((h, w), false),
        }
    }

    pub fn grid(&self) -> GridSpec {
        let (_, h, w) = self.heatmap.dim();
        GridSpec {
            height: h,
            width: w,
            downsample: self.downsample,
        }
    }

    pub fn n_bins(&self) -> usize {
        self.bin_logits.dim().0
    }

    /// Checks every channel agrees on the grid size and the class count.
    pub fn validate(&self) -> Result<()> {
        let (c, h, w) = self.heatmap.dim();
        let mismatch = |expected: Vec<usize>, found: &[usize]| Error::ShapeMismatch {
            expected,
            found: found.to_vec(),
        };
        if c != NUM_CLASSES {
            return Err(mismatch(vec![NUM_CLASSES, h, w], self.heatmap.shape()));
        }
        for (channels, arr) in [
            (2, &self.offset_2d),
            (2, &self.size_2d),
            (3, &self.size_3d),
            (self.n_bins(), &self.bin_logits),
            (self.n_bins(), &self.bin_residual),
        ] {
            if arr.dim() != (channels, h, w) {
                return Err(mismatch(vec![channels, h, w], arr.shape()));
            }
        }
        for shape in [self.depth.shape(), self.log_sigma.shape(), self.valid_mask.shape()] {
            if shape != [h, w] {
                return Err(mismatch(vec![h, w], shape));
            }
        }
        if self.n_bins() == 0 {
            return Err(Error::InvalidArgument("maps carry no heading bins".into()));
        }
        if !matches!(self.downsample, 4 | 8) {
            return Err(Error::InvalidArgument(format!(
                "downsample must be 4 or 8, got {}",
                self.downsample
            )));
        }
        Ok(())
    }

    pub fn num_objects(&self) -> usize {
        self.valid_mask.iter().filter(|&&m| m).count()
    }

    /// Ground-truth bin index per cell (argmax of `bin_logits`).
    pub fn bin_indices(&self) -> Array2<usize> {
        let (_, h, w) = self.bin_logits.dim();
        Array2::from_shape_fn((h, w), |(r, c)| argmax(self.bin_logits.slice(s![.., r, c]).iter().copied()))
    }
}

pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Why a box was left out of the target maps.
#[derive(Debug, Clone, PartialEq)]
pub enum SkipReason {
    /// The center cannot be projected (behind the camera or past the field of view).
    NotProjectable(String),
    /// The projected center falls outside the image or the grid.
    OutsideImage,
    /// Another box already owns the center cell.
    CellCollision,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeOutcome {
    pub maps: TargetMaps,
    /// `(input index, reason)` for every box that was not encoded.
    pub skipped: Vec<(usize, SkipReason)>,
}

/// Rasterizes camera-frame boxes and their 2D labels into target maps.
pub fn encode_scene(
    boxes: &[Box3D],
    boxes2d: &[Box2D],
    camera: &CameraModel,
    grid: GridSpec,
    codec: &MultiBinCodec,
) -> Result<EncodeOutcome> {
    if boxes.len() != boxes2d.len() {
        return Err(Error::InvalidArgument(format!(
            "{} 3D boxes but {} 2D boxes",
            boxes.len(),
            boxes2d.len()
        )));
    }
    let ds = grid.downsample as f64;
    let mut maps = TargetMaps::zeros(grid, codec.n_bins());
    let mut skipped = Vec::new();

    for (i, (b, b2)) in boxes.iter().zip(boxes2d).enumerate() {
        if b.frame != Frame::Camera {
            return Err(Error::InvalidArgument(format!("box {i} is not in the camera frame")));
        }
        b.validate()?;
        let center = match camera.project(b.cam_center()) {
            Ok(px) => px,
            Err(e) => {
                skipped.push((i, SkipReason::NotProjectable(e.to_string())));
                continue;
            }
        };
        let Some((row, col)) = (camera.contains(center)).then(|| grid.cell_of(center)).flatten() else {
            skipped.push((i, SkipReason::OutsideImage));
            continue;
        };
        if maps.valid_mask[[row, col]] {
            skipped.push((i, SkipReason::CellCollision));
            continue;
        }

        let radius = gaussian_radius(b2.height / ds, b2.width / ds, GAUSSIAN_MIN_OVERLAP).max(0.0) as usize;
        draw_gaussian(maps.heatmap.index_axis_mut(ndarray::Axis(0), b.class.index()), row, col, radius);

        maps.offset_2d[[0, row, col]] = (b2.u - center.u) / ds;
        maps.offset_2d[[1, row, col]] = (b2.v - center.v) / ds;
        maps.size_2d[[0, row, col]] = b2.width;
        maps.size_2d[[1, row, col]] = b2.height;
        maps.size_3d[[0, row, col]] = b.w;
        maps.size_3d[[1, row, col]] = b.h;
        maps.size_3d[[2, row, col]] = b.l;
        maps.depth[[row, col]] = b.center[2];
        let (bin, residual) = codec.encode(b.yaw);
        maps.bin_logits[[bin, row, col]] = 1.0;
        maps.bin_residual[[bin, row, col]] = residual;
        maps.valid_mask[[row, col]] = true;
    }
    Ok(EncodeOutcome { maps, skipped })
}
