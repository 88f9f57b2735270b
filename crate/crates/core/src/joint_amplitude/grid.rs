use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpdcError};
use crate::par::pairwise_sum;

/// Physical variable sampled along a grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    WavelengthSignal,
    WavelengthIdler,
    AngleSignalExternal,
    AngleIdlerExternal,
}

impl Variable {
    pub fn units(self) -> &'static str {
        match self {
            Variable::WavelengthSignal | Variable::WavelengthIdler => "m",
            Variable::AngleSignalExternal | Variable::AngleIdlerExternal => "rad",
        }
    }

    pub fn is_angle(self) -> bool {
        matches!(self, Variable::AngleSignalExternal | Variable::AngleIdlerExternal)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variable::WavelengthSignal => "wavelength_signal",
            Variable::WavelengthIdler => "wavelength_idler",
            Variable::AngleSignalExternal => "angle_signal_external",
            Variable::AngleIdlerExternal => "angle_idler_external",
        }
    }
}

/// Uniformly sampled, strictly increasing axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub variable: Variable,
    pub units: String,
    pub samples: Vec<f64>,
}

impl Axis {
    pub fn uniform(variable: Variable, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(SpdcError::domain(format!(
                "axis {} needs n >= 2 and lo < hi, got n={n}, [{lo}, {hi}]",
                variable.name()
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let samples = (0..n).map(|i| lo + step * i as f64).collect();
        Ok(Self {
            variable,
            units: variable.units().to_string(),
            samples,
        })
    }

    /// Symmetric axis `[-half, half]` whose samples are exact negatives of
    /// each other about the centre.
    pub fn symmetric(variable: Variable, half: f64, n: usize) -> Result<Self> {
        let mut axis = Self::uniform(variable, -half, half, n)?;
        let m = (n - 1) as f64;
        for (i, x) in axis.samples.iter_mut().enumerate() {
            *x = half * (2.0 * i as f64 - m) / m;
        }
        Ok(axis)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.samples[1] - self.samples[0]
    }

    pub fn first(&self) -> f64 {
        self.samples[0]
    }

    pub fn last(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.first() && x <= self.last()
    }

    /// Index of the sample nearest to `x`, if `x` lies within half a step of
    /// the axis.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let h = self.step();
        let pos = ((x - self.first()) / h).round();
        if pos < 0.0 || pos > (self.len() - 1) as f64 {
            return None;
        }
        Some(pos as usize)
    }
}

/// Complex biphoton amplitude on a 2-D grid. `values[ix * ny + iy]`; rows
/// follow `axis_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointAmplitude {
    pub axis_x: Axis,
    pub axis_y: Axis,
    pub values: Vec<Complex64>,
}

impl JointAmplitude {
    /// Build and normalize to unit discrete norm.
    pub fn new(axis_x: Axis, axis_y: Axis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != axis_x.len() * axis_y.len() {
            return Err(SpdcError::domain(format!(
                "grid has {} values for {}x{} axes",
                values.len(),
                axis_x.len(),
                axis_y.len()
            )));
        }
        let mut amp = Self { axis_x, axis_y, values };
        amp.normalize()?;
        Ok(amp)
    }

    pub fn nx(&self) -> usize {
        self.axis_x.len()
    }

    pub fn ny(&self) -> usize {
        self.axis_y.len()
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[ix * self.ny() + iy]
    }

    pub fn norm_sqr(&self) -> f64 {
        let v: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        pairwise_sum(&v)
    }

    pub(crate) fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(SpdcError::domain("joint amplitude vanishes on the grid (zero norm)"));
        }
        let s = 1.0 / n2.sqrt();
        self.values.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }

    /// `|values|^2` on the same axes, unit sum.
    pub fn intensity(&self) -> IntensityGrid {
        IntensityGrid {
            axis_x: self.axis_x.clone(),
            axis_y: self.axis_y.clone(),
            values: self.values.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.nx(), self.ny(), &self.values)
    }

    /// Swap the roles of the two axes.
    pub fn transposed(&self) -> Self {
        let (nx, ny) = (self.nx(), self.ny());
        let mut values = Vec::with_capacity(self.values.len());
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(self.values[ix * ny + iy]);
            }
        }
        Self {
            axis_x: self.axis_y.clone(),
            axis_y: self.axis_x.clone(),
            values,
        }
    }
}

/// Nonnegative intensity on a 2-D grid, normalized to unit sum. Layout as
/// [`JointAmplitude`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityGrid {
    pub axis_x: Axis,
    pub axis_y: Axis,
    pub values: Vec<f64>,
}

impl IntensityGrid {
    pub fn new(axis_x: Axis, axis_y: Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() != axis_x.len() * axis_y.len() {
            return Err(SpdcError::domain("intensity grid size does not match its axes"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(SpdcError::domain("intensity grid has negative or non-finite entries"));
        }
        let mut g = Self { axis_x, axis_y, values };
        let total = pairwise_sum(&g.values);
        if !(total > 0.0) {
            return Err(SpdcError::domain("intensity grid vanishes (zero sum)"));
        }
        g.values.iter_mut().for_each(|v| *v /= total);
        Ok(g)
    }

    pub fn nx(&self) -> usize {
        self.axis_x.len()
    }

    pub fn ny(&self) -> usize {
        self.axis_y.len()
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.ny() + iy]
    }

    /// Real amplitude `sqrt(I)` whose modulus squared is this intensity.
    pub fn sqrt_amplitude(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.nx(), self.ny(), self.values.iter().map(|v| v.sqrt()))
    }

    /// The intensity values themselves as a matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.nx(), self.ny(), &self.values)
    }

    /// Sum over `axis_y`.
    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.nx())
            .map(|ix| pairwise_sum(&self.values[ix * self.ny()..(ix + 1) * self.ny()]))
            .collect()
    }

    /// Sum over `axis_x`.
    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.ny())
            .map(|iy| {
                let col: Vec<f64> = (0..self.nx()).map(|ix| self.get(ix, iy)).collect();
                pairwise_sum(&col)
            })
            .collect()
    }
}

/// Grid resolution and window rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// Samples per axis.
    pub points: usize,
    /// Pump spectral samples for pulsed traces.
    pub pump_samples: usize,
    /// Windows extend this many estimated 1/e^2 half-widths from the centre.
    pub window_scale: f64,
    /// Override: half window of frequency detuning (Hz).
    pub spectral_half_window: Option<f64>,
    /// Override: half window of the signal external angle (rad). The idler
    /// window spans the same transverse wavevector range.
    pub angular_half_window: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 256,
            pump_samples: 33,
            window_scale: 3.0,
            spectral_half_window: None,
            angular_half_window: None,
        }
    }
}

impl GridSpec {
    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 8 {
            return Err(SpdcError::domain(format!("grid needs at least 8 points, got {}", self.points)));
        }
        if self.pump_samples == 0 {
            return Err(SpdcError::domain("pump_samples must be positive"));
        }
        if !(self.window_scale > 0.0) {
            return Err(SpdcError::domain("window_scale must be positive"));
        }
        for w in [self.spectral_half_window, self.angular_half_window].into_iter().flatten() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(SpdcError::domain("window overrides must be positive"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_axis_is_increasing() {
        let a = Axis::uniform(Variable::AngleSignalExternal, -1.0, 1.0, 5).unwrap();
        assert_eq!(a.samples, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(a.units, "rad");
        assert_eq!(a.nearest(0.26), Some(3));
        assert_eq!(a.nearest(1.3), None);
        assert!(Axis::uniform(Variable::WavelengthIdler, 1.0, 1.0, 5).is_err());
    }

    #[test]
    fn construction_normalizes() {
        let ax = Axis::uniform(Variable::AngleSignalExternal, 0.0, 1.0, 2).unwrap();
        let ay = Axis::uniform(Variable::AngleIdlerExternal, 0.0, 1.0, 3).unwrap();
        let amp = JointAmplitude::new(ax.clone(), ay.clone(), vec![Complex64::new(3.0, 4.0); 6]).unwrap();
        assert!((amp.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(JointAmplitude::new(ax.clone(), ay.clone(), vec![Complex64::default(); 6]).is_err());
        assert!(JointAmplitude::new(ax, ay, vec![Complex64::default(); 5]).is_err());
    }

    #[test]
    fn transpose_swaps_layout() {
        let ax = Axis::uniform(Variable::AngleSignalExternal, 0.0, 1.0, 2).unwrap();
        let ay = Axis::uniform(Variable::AngleIdlerExternal, 0.0, 1.0, 3).unwrap();
        let v: Vec<Complex64> = (0..6).map(|i| Complex64::new(i as f64 + 1.0, 0.0)).collect();
        let amp = JointAmplitude::new(ax, ay, v).unwrap();
        let t = amp.transposed();
        for ix in 0..2 {
            for iy in 0..3 {
                assert_eq!(amp.get(ix, iy), t.get(iy, ix));
            }
        }
    }
}
