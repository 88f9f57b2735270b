use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Result};

/// Focusing parameter: half the crystal length over the Rayleigh range,
/// `xi = lambda L / (2 pi w0^2)`.
pub fn focusing_parameter(wavelength: f64, length: f64, waist: f64) -> Result<f64> {
    require_positive("wavelength", wavelength)?;
    require_positive("crystal length", length)?;
    require_positive("waist", waist)?;
    Ok(wavelength * length / (2.0 * PI * waist * waist))
}

/// Waist (1/e^2 intensity radius) of a Gaussian beam whose full far-field
/// 1/e^2 divergence is `angular_spread`.
pub fn waist_from_angle(wavelength: f64, angular_spread: f64) -> Result<f64> {
    require_positive("wavelength", wavelength)?;
    require_positive("angular spread", angular_spread)?;
    Ok(2.0 * wavelength / (PI * angular_spread))
}

/// Full far-field 1/e^2 divergence of a Gaussian beam of the given waist.
pub fn angle_from_waist(wavelength: f64, waist: f64) -> Result<f64> {
    require_positive("wavelength", wavelength)?;
    require_positive("waist", waist)?;
    Ok(2.0 * wavelength / (PI * waist))
}

/// Rayleigh range `pi w0^2 / lambda` (vacuum).
pub fn rayleigh_range(wavelength: f64, waist: f64) -> Result<f64> {
    require_positive("wavelength", wavelength)?;
    require_positive("waist", waist)?;
    Ok(PI * waist * waist / wavelength)
}

/// A Gaussian beam at a crystal centre. `angular_spread` is the full external
/// 1/e^2 divergence and is kept consistent with `waist`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    pub wavelength: f64,
    pub waist: f64,
    pub angular_spread: f64,
}

impl BeamGeometry {
    pub fn from_waist(wavelength: f64, waist: f64) -> Result<Self> {
        Ok(Self {
            wavelength,
            waist,
            angular_spread: angle_from_waist(wavelength, waist)?,
        })
    }

    pub fn from_angle(wavelength: f64, angular_spread: f64) -> Result<Self> {
        Ok(Self {
            wavelength,
            waist: waist_from_angle(wavelength, angular_spread)?,
            angular_spread,
        })
    }

    pub fn focusing_parameter(&self, length: f64) -> Result<f64> {
        focusing_parameter(self.wavelength, length, self.waist)
    }

    /// 1/e^2 radius at axial distance `z` from the waist.
    pub fn radius_at(&self, z: f64) -> f64 {
        let zr = PI * self.waist * self.waist / self.wavelength;
        self.waist * (1.0 + (z / zr).powi(2)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn focusing_parameter_working_points() {
        assert_relative_eq!(focusing_parameter(532e-9, 10e-3, 200e-6).unwrap(), 0.0212, epsilon = 5e-5);
        assert_relative_eq!(focusing_parameter(810e-9, 10e-3, 145e-6).unwrap(), 0.0613, epsilon = 5e-5);
        assert_relative_eq!(focusing_parameter(1550e-9, 10e-3, 140e-6).unwrap(), 0.126, epsilon = 5e-4);
    }

    #[test]
    fn waist_angle_conversions() {
        assert_relative_eq!(waist_from_angle(810e-9, 0.0035).unwrap(), 147.3e-6, epsilon = 0.1e-6);
        assert_relative_eq!(waist_from_angle(1550e-9, 0.007).unwrap(), 141.0e-6, epsilon = 0.1e-6);
        assert_relative_eq!(angle_from_waist(532e-9, 200e-6).unwrap(), 0.00169, epsilon = 5e-6);
    }

    #[test]
    fn nonpositive_inputs_rejected() {
        assert!(focusing_parameter(0.0, 1e-2, 1e-4).is_err());
        assert!(focusing_parameter(5e-7, -1e-2, 1e-4).is_err());
        assert!(waist_from_angle(5e-7, 0.0).is_err());
        assert!(angle_from_waist(5e-7, f64::NAN).is_err());
    }

    #[test]
    fn geometry_is_self_consistent() {
        let g = BeamGeometry::from_angle(810e-9, 0.0035).unwrap();
        assert_relative_eq!(g.angular_spread, angle_from_waist(g.wavelength, g.waist).unwrap(), max_relative = 1e-14);
        assert_relative_eq!(g.radius_at(0.0), g.waist);
    }
}
