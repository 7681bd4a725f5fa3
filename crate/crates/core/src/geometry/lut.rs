//! Precomputed `theta <-> theta_d` table.
//!
//! The grid is uniform in `theta` over `[0, pi/2]`. Forward lookups index the
//! grid directly; inverse lookups binary-search the (strictly increasing)
//! `theta_d` column. Both directions interpolate linearly inside a cell.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::DistortionCoeffs;

pub const DEFAULT_LUT_GRIDS: usize = 900;

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionTable {
    theta_grid: Vec<f64>,
    theta_d_grid: Vec<f64>,
    step: f64,
}

impl DistortionTable {
    /// Samples the distortion map on `n_grids` nodes and rejects coefficient
    /// sets for which the sampled map is not strictly increasing.
    pub fn build(coeffs: &DistortionCoeffs, n_grids: usize) -> Result<Self> {
        if n_grids < 2 {
            return Err(Error::InvalidArgument(format!(
                "lookup table needs at least 2 grids, got {n_grids}"
            )));
        }
        if !coeffs.is_finite() {
            return Err(Error::InvalidArgument("non-finite distortion coefficient".into()));
        }
        let step = FRAC_PI_2 / (n_grids - 1) as f64;
        let theta_grid: Vec<f64> = (0..n_grids)
            .map(|i| if i + 1 == n_grids { FRAC_PI_2 } else { i as f64 * step })
            .collect();
        let theta_d_grid: Vec<f64> = theta_grid.iter().map(|&t| coeffs.eval(t)).collect();
        for i in 1..n_grids {
            if theta_d_grid[i] <= theta_d_grid[i - 1] || coeffs.derivative(theta_grid[i]) <= 0.0 {
                return Err(Error::MonotonicityViolation { index: i });
            }
        }
        Ok(Self {
            theta_grid,
            theta_d_grid,
            step,
        })
    }

    pub fn n_grids(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn theta_grid(&self) -> &[f64] {
        &self.theta_grid
    }

    pub fn theta_d_grid(&self) -> &[f64] {
        &self.theta_d_grid
    }

    pub fn max_theta_d(&self) -> f64 {
        *self.theta_d_grid.last().expect("table has at least two nodes")
    }

    pub fn theta_d_from_theta(&self, theta: f64) -> Result<f64> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::ThetaOutOfRange { theta });
        }
        let last = self.n_grids() - 1;
        let i = ((theta / self.step) as usize).min(last - 1);
        Ok(lerp(
            theta,
            self.theta_grid[i],
            self.theta_grid[i + 1],
            self.theta_d_grid[i],
            self.theta_d_grid[i + 1],
        ))
    }

    /// Inverse lookup. Out-of-range input is an error, never clamped.
    pub fn theta_from_theta_d(&self, theta_d: f64) -> Result<f64> {
        let max = self.max_theta_d();
        if !(0.0..=max).contains(&theta_d) {
            return Err(Error::ThetaDOutOfRange { theta_d, max });
        }
        // First node strictly above the query; the bracketing cell is [i-1, i].
        let i = self.theta_d_grid.partition_point(|&d| d <= theta_d);
        if i == 0 {
            return Ok(self.theta_grid[0]);
        }
        if i == self.n_grids() {
            return Ok(self.theta_grid[i - 1]);
        }
        Ok(lerp(
            theta_d,
            self.theta_d_grid[i - 1],
            self.theta_d_grid[i],
            self.theta_grid[i - 1],
            self.theta_grid[i],
        ))
    }
}

#[inline]
fn lerp(x: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let t = (x - x0) / (x1 - x0);
    y0 + t * (y1 - y0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: DistortionCoeffs = DistortionCoeffs::new(-0.05, 0.01, -0.002, 0.0001);

    #[test]
    fn default_size_and_endpoints() {
        let lut = DistortionTable::build(&FIXTURE, DEFAULT_LUT_GRIDS).unwrap();
        assert_eq!(lut.n_grids(), 900);
        assert_eq!(lut.theta_d_grid()[0], 0.0);
        assert_eq!(lut.theta_grid()[899], FRAC_PI_2);
    }

    #[test]
    fn identity_when_undistorted() {
        let lut = DistortionTable::build(&DistortionCoeffs::zero(), 900).unwrap();
        assert_eq!(lut.theta_grid(), lut.theta_d_grid());
        assert!((lut.theta_from_theta_d(0.3).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn grid_values_match_pointwise_evaluation() {
        let lut = DistortionTable::build(&FIXTURE, 900).unwrap();
        for (t, d) in lut.theta_grid().iter().zip(lut.theta_d_grid()) {
            assert_eq!(*d, FIXTURE.theta_d_from_theta(*t).unwrap());
        }
    }

    #[test]
    fn node_hits_return_grid_values() {
        let lut = DistortionTable::build(&FIXTURE, 900).unwrap();
        for i in [0, 1, 17, 450, 898, 899] {
            assert_eq!(lut.theta_from_theta_d(lut.theta_d_grid()[i]).unwrap(), lut.theta_grid()[i]);
            assert_eq!(lut.theta_d_from_theta(lut.theta_grid()[i]).unwrap(), lut.theta_d_grid()[i]);
        }
    }

    #[test]
    fn pathological_coefficients_rejected() {
        // theta_d = theta (1 - 0.5 theta^2) turns over at theta = sqrt(2/3).
        let bad = DistortionCoeffs::new(-0.5, 0.0, 0.0, 0.0);
        match DistortionTable::build(&bad, 900) {
            Err(Error::MonotonicityViolation { index }) => {
                let step = FRAC_PI_2 / 899.0;
                let turn = (2.0_f64 / 3.0).sqrt() / step;
                assert!((index as f64 - turn).abs() < 2.0, "index {index}");
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_is_explicit() {
        let lut = DistortionTable::build(&FIXTURE, 900).unwrap();
        assert!(lut.theta_from_theta_d(lut.max_theta_d() * 1.0001).is_err());
        assert!(lut.theta_from_theta_d(-1e-12).is_err());
        assert!(lut.theta_d_from_theta(2.0).is_err());
        assert!(DistortionTable::build(&FIXTURE, 1).is_err());
    }

    #[test]
    fn inverse_sweep_agrees_with_exact_solver() {
        let lut = DistortionTable::build(&FIXTURE, 900).unwrap();
        let max = lut.max_theta_d();
        let worst = (0..=10_000)
            .map(|i| max * i as f64 / 10_000.0)
            .map(|d| (lut.theta_from_theta_d(d).unwrap() - FIXTURE.theta_from_theta_d_exact(d).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "worst {worst}");
    }
}
