//! Equidistant-polynomial fisheye distortion: the map from the field angle
//! `theta` of an incoming ray to the distorted angle `theta_d` that sets its
//! radial distance in the normalized image plane.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial coefficients of
/// `theta_d = theta * (1 + k1 theta^2 + k2 theta^4 + k3 theta^6 + k4 theta^8)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DistortionCoeffs {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

/// Residual bound guaranteed by [`DistortionCoeffs::theta_from_theta_d_exact`].
pub const EXACT_SOLVER_TOLERANCE: f64 = 1e-12;

impl DistortionCoeffs {
    pub const fn new(k1: f64, k2: f64, k3: f64, k4: f64) -> Self {
        Self { k1, k2, k3, k4 }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        [self.k1, self.k2, self.k3, self.k4].iter().all(|k| k.is_finite())
    }

    /// Evaluates the polynomial without a domain check.
    #[inline]
    pub fn eval(&self, theta: f64) -> f64 {
        let t2 = theta * theta;
        theta * (1.0 + t2 * (self.k1 + t2 * (self.k2 + t2 * (self.k3 + t2 * self.k4))))
    }

    /// `d theta_d / d theta`.
    #[inline]
    pub fn derivative(&self, theta: f64) -> f64 {
        let t2 = theta * theta;
        1.0 + t2 * (3.0 * self.k1 + t2 * (5.0 * self.k2 + t2 * (7.0 * self.k3 + t2 * 9.0 * self.k4)))
    }

    pub fn theta_d_from_theta(&self, theta: f64) -> Result<f64> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::ThetaOutOfRange { theta });
        }
        Ok(self.eval(theta))
    }

    /// Largest representable distorted angle, reached at `theta = pi/2`.
    pub fn max_theta_d(&self) -> f64 {
        self.eval(FRAC_PI_2)
    }

    /// Inverts the distortion polynomial by bisection on `[0, pi/2]`, run
    /// until the bracket collapses to adjacent floats.
    ///
    /// Assumes the map is monotone on that interval (which `DistortionTable`
    /// construction verifies), so the bracket always holds exactly one root.
    pub fn theta_from_theta_d_exact(&self, theta_d: f64) -> Result<f64> {
        let max = self.max_theta_d();
        if !(0.0..=max).contains(&theta_d) {
            return Err(Error::ThetaDOutOfRange { theta_d, max });
        }
        if theta_d == 0.0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0_f64, FRAC_PI_2);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let residual = self.eval(mid) - theta_d;
            if residual == 0.0 || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if residual < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: DistortionCoeffs = DistortionCoeffs::new(-0.05, 0.01, -0.002, 0.0001);

    #[test]
    fn zero_angle_maps_to_zero() {
        assert_eq!(FIXTURE.theta_d_from_theta(0.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_coefficients_are_identity() {
        assert_eq!(DistortionCoeffs::zero().theta_d_from_theta(0.5).unwrap(), 0.5);
        assert_eq!(DistortionCoeffs::zero().theta_from_theta_d_exact(0.7).unwrap(), 0.7);
    }

    #[test]
    fn fixture_value_matches_high_precision_evaluation() {
        // 40-digit evaluation of the polynomial at theta = 0.5.
        let expected = 0.494_047_070_312_5;
        assert!((FIXTURE.theta_d_from_theta(0.5).unwrap() - expected).abs() < 1e-15);
        let max_expected = 1.431_268_257_067_974_5;
        assert!((FIXTURE.max_theta_d() - max_expected).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            FIXTURE.theta_d_from_theta(-1e-3),
            Err(Error::ThetaOutOfRange { .. })
        ));
        assert!(FIXTURE.theta_d_from_theta(FRAC_PI_2 + 1e-9).is_err());
        assert!(matches!(
            FIXTURE.theta_from_theta_d_exact(FIXTURE.max_theta_d() + 1e-6),
            Err(Error::ThetaDOutOfRange { .. })
        ));
        assert!(FIXTURE.theta_from_theta_d_exact(-0.1).is_err());
    }

    #[test]
    fn exact_inverse_round_trips() {
        assert_eq!(FIXTURE.theta_from_theta_d_exact(0.0).unwrap(), 0.0);
        let td = FIXTURE.eval(0.9);
        let theta = FIXTURE.theta_from_theta_d_exact(td).unwrap();
        assert!((theta - 0.9).abs() < 1e-10);
        assert!((FIXTURE.eval(theta) - td).abs() < EXACT_SOLVER_TOLERANCE);
        let top = FIXTURE.theta_from_theta_d_exact(FIXTURE.max_theta_d()).unwrap();
        assert!((top - FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &t in &[0.1, 0.6, 1.2, 1.5] {
            let h = 1e-6;
            let fd = (FIXTURE.eval(t + h) - FIXTURE.eval(t - h)) / (2.0 * h);
            assert!((fd - FIXTURE.derivative(t)).abs() < 1e-8);
        }
    }
}
