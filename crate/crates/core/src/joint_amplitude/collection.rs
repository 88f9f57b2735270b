use serde::{Deserialize, Serialize};

use super::grid::{Axis, JointAmplitude};
use crate::dispersion::{angle_from_waist, waist_from_angle};
use crate::error::{require_positive, Result, SpdcError};

/// Gaussian collection mode of a fiber imaged to the crystal centre,
/// described in the far field by its full external 1/e^2 divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectionMode {
    pub wavelength: f64,
    pub angular_spread: f64,
    #[serde(default)]
    pub center_angle: f64,
}

impl CollectionMode {
    pub fn new(wavelength: f64, angular_spread: f64) -> Result<Self> {
        require_positive("collection wavelength", wavelength)?;
        require_positive("collection angular spread", angular_spread)?;
        Ok(Self {
            wavelength,
            angular_spread,
            center_angle: 0.0,
        })
    }

    pub fn from_waist(wavelength: f64, waist: f64) -> Result<Self> {
        Self::new(wavelength, angle_from_waist(wavelength, waist)?)
    }

    pub fn waist(&self) -> f64 {
        waist_from_angle(self.wavelength, self.angular_spread).expect("validated at construction")
    }

    /// Far-field field amplitude, 1/e at half the full spread from the centre.
    #[inline]
    pub fn profile(&self, theta: f64) -> f64 {
        let half = 0.5 * self.angular_spread;
        (-((theta - self.center_angle) / half).powi(2)).exp()
    }

    /// Profile sampled on an angle axis, normalized to unit discrete norm.
    pub fn discrete_mode(&self, axis: &Axis) -> Result<Vec<f64>> {
        self.check_axis(axis)?;
        let mut v: Vec<f64> = axis.samples.iter().map(|&t| self.profile(t)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(SpdcError::domain("collection mode vanishes on the axis"));
        }
        v.iter_mut().for_each(|x| *x /= n);
        Ok(v)
    }

    pub(crate) fn check_axis(&self, axis: &Axis) -> Result<()> {
        if !axis.variable.is_angle() {
            return Err(SpdcError::domain(format!(
                "collection applies to angle axes only, not {}",
                axis.variable.name()
            )));
        }
        if !axis.contains(self.center_angle) {
            return Err(SpdcError::domain(format!(
                "collection centre {} rad outside axis window [{}, {}]",
                self.center_angle,
                axis.first(),
                axis.last()
            )));
        }
        Ok(())
    }
}

/// Multiply the angle axes of `amp` by Gaussian acceptances and renormalize.
pub fn apply_collection(
    amp: &JointAmplitude,
    mode_x: Option<&CollectionMode>,
    mode_y: Option<&CollectionMode>,
) -> Result<JointAmplitude> {
    let weights = |mode: Option<&CollectionMode>, axis: &Axis| -> Result<Vec<f64>> {
        match mode {
            None => Ok(vec![1.0; axis.len()]),
            Some(m) => {
                m.check_axis(axis)?;
                Ok(axis.samples.iter().map(|&t| m.profile(t)).collect())
            }
        }
    };
    let wx = weights(mode_x, &amp.axis_x)?;
    let wy = weights(mode_y, &amp.axis_y)?;
    let ny = amp.ny();
    let values = amp
        .values
        .iter()
        .enumerate()
        .map(|(k, z)| z * (wx[k / ny] * wy[k % ny]))
        .collect();
    JointAmplitude::new(amp.axis_x.clone(), amp.axis_y.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint_amplitude::Variable;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn discrete_mode_has_unit_norm() {
        let axis = Axis::symmetric(Variable::AngleSignalExternal, 0.02, 201).unwrap();
        let m = CollectionMode::new(810e-9, 0.0035).unwrap();
        let u = m.discrete_mode(&axis).unwrap();
        assert_relative_eq!(u.iter().map(|x| x * x).sum::<f64>(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(m.profile(0.0035 / 2.0), (-1.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn wavelength_axis_rejected() {
        let axis = Axis::uniform(Variable::WavelengthSignal, 800e-9, 820e-9, 16).unwrap();
        let m = CollectionMode::new(810e-9, 0.0035).unwrap();
        assert!(m.discrete_mode(&axis).is_err());
    }

    #[test]
    fn center_outside_window_rejected() {
        let ax = Axis::symmetric(Variable::AngleSignalExternal, 0.01, 16).unwrap();
        let ay = Axis::symmetric(Variable::AngleIdlerExternal, 0.01, 16).unwrap();
        let amp = JointAmplitude::new(ax, ay, vec![Complex64::new(1.0, 0.0); 256]).unwrap();
        let mut m = CollectionMode::new(810e-9, 0.0035).unwrap();
        m.center_angle = 0.02;
        assert!(apply_collection(&amp, Some(&m), None).is_err());
    }

    #[test]
    fn wide_acceptance_is_identity() {
        let ax = Axis::symmetric(Variable::AngleSignalExternal, 0.01, 16).unwrap();
        let ay = Axis::symmetric(Variable::AngleIdlerExternal, 0.01, 12).unwrap();
        let values: Vec<Complex64> = (0..16 * 12)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let amp = JointAmplitude::new(ax, ay, values).unwrap();
        let wide = CollectionMode::new(810e-9, 1e6).unwrap();
        let out = apply_collection(&amp, Some(&wide), Some(&wide)).unwrap();
        for (a, b) in amp.values.iter().zip(&out.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
