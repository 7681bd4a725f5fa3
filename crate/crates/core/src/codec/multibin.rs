use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::codec::wrap_angle;
use crate::error::{Error, Result};

pub const DEFAULT_NUM_BINS: usize = 2;

/// Heading codec: `(-pi, pi]` split into `n_bins` equal sectors plus an
/// intra-bin residual relative to the sector center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiBinCodec {
    n_bins: usize,
    bin_centers: Vec<f64>,
}

impl Default for MultiBinCodec {
    fn default() -> Self {
        Self::new(DEFAULT_NUM_BINS).expect("default bin count is valid")
    }
}

impl MultiBinCodec {
    pub fn new(n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::InvalidArgument("MultiBin needs at least one bin".into()));
        }
        let width = TAU / n_bins as f64;
        let bin_centers = (0..n_bins).map(|i| -PI + (i as f64 + 0.5) * width).collect();
        Ok(Self { n_bins, bin_centers })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn bin_centers(&self) -> &[f64] {
        &self.bin_centers
    }

    pub fn bin_width(&self) -> f64 {
        TAU / self.n_bins as f64
    }

    /// Returns `(bin_index, residual)` with `residual` in `[-pi/n, pi/n)`.
    pub fn encode(&self, yaw: f64) -> (usize, f64) {
        let yaw = wrap_angle(yaw);
        let idx = (((yaw + PI) / self.bin_width()).floor() as usize) % self.n_bins;
        let mut residual = yaw - self.bin_centers[idx];
        // Only yaw = pi folds back into bin 0 and lands a full turn away.
        if residual >= PI {
            residual -= TAU;
        }
        let half = 0.5 * self.bin_width();
        (idx, residual.clamp(-half, half))
    }

    pub fn decode(&self, bin_index: usize, residual: f64) -> f64 {
        wrap_angle(self.bin_centers[bin_index % self.n_bins] + residual)
    }
}
