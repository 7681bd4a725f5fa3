use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DistortionCoeffs, DistortionTable, ExtrinsicPose, DEFAULT_LUT_GRIDS};

/// Points with `z` at or below this are rejected by [`CameraModel::project`].
pub const EPSILON_Z: f64 = 1e-6;
/// Below this radius the `theta_d / r` and `r / theta_d` ratios take their limit 1.
const SMALL_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub f_u: f64,
    pub f_v: f64,
    pub c_u: f64,
    pub c_v: f64,
}

impl Intrinsics {
    pub const fn new(f_u: f64, f_v: f64, c_u: f64, c_v: f64) -> Self {
        Self { f_u, f_v, c_u, c_v }
    }

    fn validate(&self) -> Result<()> {
        if !(self.f_u > 0.0 && self.f_v > 0.0 && self.f_u.is_finite() && self.f_v.is_finite()) {
            return Err(Error::InvalidCamera(format!(
                "focal lengths must be positive, got ({}, {})",
                self.f_u, self.f_v
            )));
        }
        if !(self.c_u.is_finite() && self.c_v.is_finite()) {
            return Err(Error::InvalidCamera("non-finite principal point".into()));
        }
        Ok(())
    }
}

/// A point in the camera frame: x right, y down, z along the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CamPoint3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CamPoint3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &CamPoint3) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }

    /// Angle between the ray through this point and the optical axis.
    pub fn field_angle(&self) -> f64 {
        self.x.hypot(self.y).atan2(self.z)
    }
}

/// Continuous pixel coordinates; never rounded inside the geometry code.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pixel {
    pub u: f64,
    pub v: f64,
}

impl Pixel {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

/// How [`CameraModel::unproject`] inverts the distortion polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InverseMode {
    /// Bisection to machine tolerance.
    Exact,
    /// Binary search plus linear interpolation in the precomputed table.
    #[default]
    Lut,
}

impl std::str::FromStr for InverseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "lut" => Ok(Self::Lut),
            other => Err(Error::InvalidArgument(format!("unknown inverse mode `{other}`"))),
        }
    }
}

/// A calibrated fisheye camera. Immutable once built; the lookup table is
/// derived from the distortion coefficients at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraModel {
    intrinsics: Intrinsics,
    distortion: DistortionCoeffs,
    pose: ExtrinsicPose,
    image_width: u32,
    image_height: u32,
    lut: DistortionTable,
}

impl CameraModel {
    pub fn new(
        intrinsics: Intrinsics,
        distortion: DistortionCoeffs,
        pose: ExtrinsicPose,
        image_width: u32,
        image_height: u32,
    ) -> Result<Self> {
        Self::with_lut_grids(intrinsics, distortion, pose, image_width, image_height, DEFAULT_LUT_GRIDS)
    }

    pub fn with_lut_grids(
        intrinsics: Intrinsics,
        distortion: DistortionCoeffs,
        pose: ExtrinsicPose,
        image_width: u32,
        image_height: u32,
        n_grids: usize,
    ) -> Result<Self> {
        intrinsics.validate()?;
        if image_width == 0 || image_height == 0 {
            return Err(Error::InvalidCamera(format!(
                "image dimensions must be positive, got {image_width}x{image_height}"
            )));
        }
        if !pose.is_finite() {
            return Err(Error::InvalidCamera("non-finite extrinsic pose".into()));
        }
        let lut = DistortionTable::build(&distortion, n_grids)?;
        Ok(Self {
            intrinsics,
            distortion,
            pose,
            image_width,
            image_height,
            lut,
        })
    }

    pub fn intrinsics(&self) -> &Intrinsics {
        &self.intrinsics
    }

    pub fn distortion(&self) -> &DistortionCoeffs {
        &self.distortion
    }

    pub fn pose(&self) -> &ExtrinsicPose {
        &self.pose
    }

    pub fn lut(&self) -> &DistortionTable {
        &self.lut
    }

    pub fn image_width(&self) -> u32 {
        self.image_width
    }

    pub fn image_height(&self) -> u32 {
        self.image_height
    }

    pub fn with_pose(&self, pose: ExtrinsicPose) -> Result<Self> {
        if !pose.is_finite() {
            return Err(Error::InvalidCamera("non-finite extrinsic pose".into()));
        }
        Ok(Self { pose, ..self.clone() })
    }

    pub fn contains(&self, px: Pixel) -> bool {
        px.u >= 0.0 && px.v >= 0.0 && px.u < self.image_width as f64 && px.v < self.image_height as f64
    }

    /// Maps a camera-frame point to its distorted pixel location.
    pub fn project(&self, p: CamPoint3) -> Result<Pixel> {
        if !(p.z > EPSILON_Z) {
            return Err(Error::BehindCamera { z: p.z });
        }
        let a = p.x / p.z;
        let b = p.y / p.z;
        let r = a.hypot(b);
        let theta = r.atan();
        if theta > FRAC_PI_2 {
            return Err(Error::FieldOfViewExceeded { theta });
        }
        let theta_d = self.distortion.eval(theta);
        let scale = if r < SMALL_RADIUS { 1.0 } else { theta_d / r };
        let (xd, yd) = (scale * a, scale * b);
        let k = &self.intrinsics;
        Ok(Pixel::new(k.f_u * xd + k.c_u, k.f_v * yd + k.c_v))
    }

    /// Recovers the camera-frame point at depth `depth_z` behind `px`.
    pub fn unproject(&self, px: Pixel, depth_z: f64, mode: InverseMode) -> Result<CamPoint3> {
        if !(depth_z > 0.0) || !depth_z.is_finite() {
            return Err(Error::NonPositiveDepth { depth: depth_z });
        }
        let k = &self.intrinsics;
        let xd = (px.u - k.c_u) / k.f_u;
        let yd = (px.v - k.c_v) / k.f_v;
        let theta_d = xd.hypot(yd);
        let theta = match mode {
            InverseMode::Exact => self.distortion.theta_from_theta_d_exact(theta_d)?,
            InverseMode::Lut => self.lut.theta_from_theta_d(theta_d)?,
        };
        let r = theta.tan();
        let scale = if theta_d < SMALL_RADIUS { 1.0 } else { r / theta_d };
        Ok(CamPoint3::new(xd * scale * depth_z, yd * scale * depth_z, depth_z))
    }

    /// Intrinsics after cropping rows off the top and bottom of the image and
    /// resizing the remainder to `out_w x out_h`. Distortion acts on angles
    /// and is left untouched.
    pub fn adjust_for_preprocess(&self, crop_top: u32, crop_bottom: u32, out_w: u32, out_h: u32) -> Result<Self> {
        let remaining = self
            .image_height
            .checked_sub(crop_top)
            .and_then(|h| h.checked_sub(crop_bottom))
            .filter(|&h| h > 0)
            .ok_or(Error::InvalidCrop {
                top: crop_top,
                bottom: crop_bottom,
                height: self.image_height,
            })?;
        if out_w == 0 || out_h == 0 {
            return Err(Error::InvalidArgument("output dimensions must be positive".into()));
        }
        let s_x = out_w as f64 / self.image_width as f64;
        let s_y = out_h as f64 / remaining as f64;
        let k = &self.intrinsics;
        let intrinsics = Intrinsics::new(k.f_u * s_x, k.f_v * s_y, k.c_u * s_x, (k.c_v - crop_top as f64) * s_y);
        intrinsics.validate()?;
        Ok(Self {
            intrinsics,
            image_width: out_w,
            image_height: out_h,
            ..self.clone()
        })
    }
}
