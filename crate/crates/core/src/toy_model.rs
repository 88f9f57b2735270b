//! One-dimensional picture of heralding with a plane-wave pump: the pair is
//! perfectly anticorrelated in transverse momentum, so projecting one photon
//! onto a Gaussian fiber mode leaves its partner in the same Gaussian,
//! tilted by the pump momentum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Result, SpdcError};

/// Default samples and half-span (in units of sigma) of the position grid.
pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_SPAN_SIGMAS: f64 = 8.0;
/// Minimum half-span, in sigma, for a grid to hold a Gaussian mode.
pub const MIN_SPAN_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Position,
    Momentum,
}

/// Uniform 1-D sampling `start + j * step`, `j < points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub start: f64,
    pub step: f64,
    pub points: usize,
}

impl Grid1D {
    /// Symmetric grid over `[-half, half]`.
    pub fn symmetric(half: f64, points: usize) -> Result<Self> {
        require_positive("grid half width", half)?;
        if points < 16 {
            return Err(SpdcError::domain("a 1-D grid needs at least 16 points"));
        }
        Ok(Self {
            start: -half,
            step: 2.0 * half / (points - 1) as f64,
            points,
        })
    }

    /// The default grid for a mode of width `sigma`.
    pub fn for_sigma(sigma: f64) -> Result<Self> {
        require_positive("sigma", sigma)?;
        Self::symmetric(DEFAULT_SPAN_SIGMAS * sigma, DEFAULT_POINTS)
    }

    pub fn sample(&self, j: usize) -> f64 {
        self.start + self.step * j as f64
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.sample(j)).collect()
    }

    pub fn half_span(&self) -> f64 {
        self.sample(self.points - 1).abs().min(self.start.abs())
    }

    /// Conjugate momentum grid of the FFT, centred on zero.
    pub fn reciprocal(&self) -> Self {
        let n = self.points;
        let dk = 2.0 * PI / (n as f64 * self.step);
        Self {
            start: -((n / 2) as f64) * dk,
            step: dk,
            points: n,
        }
    }

    fn same_as(&self, other: &Grid1D) -> bool {
        let tol = 1e-12 * self.step.abs().max(other.step.abs());
        self.points == other.points
            && (self.start - other.start).abs() <= tol * self.points as f64
            && (self.step - other.step).abs() <= tol
    }
}

/// Complex samples of a wavefunction with unit discrete norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavefunction1D {
    pub basis: Basis,
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
}

impl Wavefunction1D {
    pub fn new(basis: Basis, grid: Grid1D, mut values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points {
            return Err(SpdcError::domain("wavefunction length does not match its grid"));
        }
        let n: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(SpdcError::domain("wavefunction has zero or non-finite norm"));
        }
        values.iter_mut().for_each(|z| *z /= n);
        Ok(Self { basis, grid, values })
    }

    /// Probability-weighted mean and standard deviation of the coordinate.
    pub fn moments(&self) -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (j, z) in self.values.iter().enumerate() {
            let x = self.grid.sample(j);
            let p = z.norm_sqr();
            m1 += p * x;
            m2 += p * x * x;
        }
        (m1, (m2 - m1 * m1).sqrt())
    }

    /// Mean local phase gradient `d arg / dx` over `[lo, hi]`.
    pub fn phase_slope(&self, lo: f64, hi: f64) -> Result<f64> {
        let mut acc = 0.0;
        let mut count = 0usize;
        for j in 0..self.values.len() - 1 {
            let (a, b) = (self.grid.sample(j), self.grid.sample(j + 1));
            if a >= lo && b <= hi {
                acc += (self.values[j + 1] * self.values[j].conj()).arg() / self.grid.step;
                count += 1;
            }
        }
        if count == 0 {
            return Err(SpdcError::domain("phase slope window holds no grid interval"));
        }
        Ok(acc / count as f64)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            basis: self.basis,
            grid: self.grid,
            values: self.values.iter().map(|z| z * factor).collect(),
        }
    }
}

/// Position amplitude `(2 pi s^2)^(-1/4) exp(-x^2 / 4 s^2)`.
pub fn gaussian_position(x: f64, sigma: f64) -> f64 {
    (2.0 * PI * sigma * sigma).powf(-0.25) * (-x * x / (4.0 * sigma * sigma)).exp()
}

/// Momentum amplitude `(2/pi)^(1/4) s^(1/2) exp(-k^2 s^2)`.
pub fn gaussian_momentum(k: f64, sigma: f64) -> f64 {
    (2.0 / PI).powf(0.25) * sigma.sqrt() * (-k * k * sigma * sigma).exp()
}

/// A Gaussian mode of width `sigma` on `grid`, with its momentum form on the
/// conjugate FFT grid.
pub fn gaussian_mode(sigma: f64, grid: &Grid1D) -> Result<(Wavefunction1D, Wavefunction1D)> {
    require_positive("sigma", sigma)?;
    if grid.half_span() < MIN_SPAN_SIGMAS * sigma {
        return Err(SpdcError::domain(format!(
            "grid half span {} is narrower than {MIN_SPAN_SIGMAS} sigma",
            grid.half_span()
        )));
    }
    let pos = (0..grid.points)
        .map(|j| Complex64::new(gaussian_position(grid.sample(j), sigma), 0.0))
        .collect();
    let kg = grid.reciprocal();
    let mom = (0..kg.points)
        .map(|m| Complex64::new(gaussian_momentum(kg.sample(m), sigma), 0.0))
        .collect();
    Ok((
        Wavefunction1D::new(Basis::Position, *grid, pos)?,
        Wavefunction1D::new(Basis::Momentum, kg, mom)?,
    ))
}

/// Discrete Fourier transform onto the conjugate FFT grid, keeping the
/// continuous-transform phases.
pub fn fourier_transform(psi: &Wavefunction1D) -> Result<Wavefunction1D> {
    fourier_transform_to(psi, &psi.grid.reciprocal())
}

/// Discrete Fourier transform onto `target`, which must be conjugate to the
/// input grid (`N dx dk = 2 pi`) but may have any origin.
pub fn fourier_transform_to(psi: &Wavefunction1D, target: &Grid1D) -> Result<Wavefunction1D> {
    let n = psi.grid.points;
    if target.points != n || ((n as f64) * psi.grid.step * target.step / (2.0 * PI) - 1.0).abs() > 1e-9 {
        return Err(SpdcError::domain("target grid is not conjugate to the input grid"));
    }
    let (sign, basis) = match psi.basis {
        Basis::Position => (-1.0, Basis::Momentum),
        Basis::Momentum => (1.0, Basis::Position),
    };
    let (x0, k0) = (psi.grid.start, target.start);
    // f(x_j) e^{-i k_m x_j} with x_j = x0 + j dx and k_m = k0 + m dk.
    let mut buf: Vec<Complex64> = psi
        .values
        .iter()
        .enumerate()
        .map(|(j, z)| z * Complex64::from_polar(1.0, sign * k0 * j as f64 * psi.grid.step))
        .collect();
    let mut planner = FftPlanner::new();
    let fft = if sign < 0.0 {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    fft.process(&mut buf);
    let out: Vec<Complex64> = buf
        .iter()
        .enumerate()
        .map(|(m, z)| z * Complex64::from_polar(1.0, sign * target.sample(m) * x0))
        .collect();
    Wavefunction1D::new(basis, *target, out)
}

/// Which photon is projected onto the fiber mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projected {
    Idler,
    Signal,
}

/// Partner state in position, `Psi(x) = int dk <x|k> phi*(k_p - k)`, from a
/// trapezoidal sum over a momentum grid centred on `k_p`.
pub fn herald(k_p: f64, sigma: f64, grid: &Grid1D, projected: Projected) -> Result<Wavefunction1D> {
    require_positive("sigma", sigma)?;
    if !k_p.is_finite() {
        return Err(SpdcError::domain("pump momentum must be finite"));
    }
    if grid.half_span() < MIN_SPAN_SIGMAS * sigma {
        return Err(SpdcError::domain("grid narrower than 6 sigma"));
    }
    let nyquist = PI / grid.step;
    // The mode's momentum spread reaches 4/sigma at exp(-16) amplitude.
    if k_p.abs() + 4.0 / sigma >= nyquist {
        return Err(SpdcError::domain(format!(
            "pump momentum {k_p} rad/m aliases on this grid (Nyquist {nyquist})"
        )));
    }
    // Exchange symmetry: the amplitude depends on k_s + k_i only, so either
    // projection uses the same kernel.
    let _ = projected;
    let nk = grid.points;
    let half_k = 8.0 / sigma;
    let dk = 2.0 * half_k / (nk - 1) as f64;
    let k0 = k_p - half_k;
    let weights: Vec<f64> = (0..nk)
        .map(|m| {
            let w = if m == 0 || m == nk - 1 { 0.5 } else { 1.0 };
            w * dk * gaussian_momentum(k_p - (k0 + dk * m as f64), sigma) / (2.0 * PI).sqrt()
        })
        .collect();
    let values = (0..grid.points)
        .map(|j| {
            let x = grid.sample(j);
            let step = Complex64::from_polar(1.0, dk * x);
            let mut phase = Complex64::from_polar(1.0, k0 * x);
            let mut acc = Complex64::default();
            for w in &weights {
                acc += phase * w;
                phase *= step;
            }
            acc
        })
        .collect();
    Wavefunction1D::new(Basis::Position, *grid, values)
}

/// Heralded signal (idler projected onto the fiber mode).
pub fn herald_signal(k_p: f64, sigma: f64, grid: &Grid1D) -> Result<Wavefunction1D> {
    herald(k_p, sigma, grid, Projected::Idler)
}

/// Heralded idler (signal projected onto the fiber mode).
pub fn herald_idler(k_p: f64, sigma: f64, grid: &Grid1D) -> Result<Wavefunction1D> {
    herald(k_p, sigma, grid, Projected::Signal)
}

/// Closed form of the heralded state: `exp(i k_p x)` times the fiber mode.
pub fn heralded_closed_form(k_p: f64, sigma: f64, grid: &Grid1D) -> Result<Wavefunction1D> {
    let values = (0..grid.points)
        .map(|j| {
            let x = grid.sample(j);
            Complex64::from_polar(gaussian_position(x, sigma), k_p * x)
        })
        .collect();
    Wavefunction1D::new(Basis::Position, *grid, values)
}

/// `|<a|b>|^2` for unit-norm states on the same grid.
pub fn fidelity(a: &Wavefunction1D, b: &Wavefunction1D) -> Result<f64> {
    if a.basis != b.basis || !a.grid.same_as(&b.grid) {
        return Err(SpdcError::domain("fidelity needs states on the same grid"));
    }
    let ov: Complex64 = a.values.iter().zip(&b.values).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.values.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.values.iter().map(|z| z.norm_sqr()).sum();
    Ok((ov.norm_sqr() / (na * nb)).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn intensity_falls_by_e2_at_two_sigma() {
        let r = gaussian_position(2.0, 1.0).powi(2) / gaussian_position(0.0, 1.0).powi(2);
        assert_relative_eq!(r, (-2.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn narrow_grid_rejected() {
        let g = Grid1D::symmetric(5.0, 256).unwrap();
        assert!(gaussian_mode(1.0, &g).is_err());
    }

    #[test]
    fn minimum_uncertainty() {
        let g = Grid1D::for_sigma(1.0).unwrap();
        let (x, k) = gaussian_mode(1.0, &g).unwrap();
        let (_, dx) = x.moments();
        let (_, dk) = k.moments();
        assert_relative_eq!(dx * dk, 0.5, max_relative = 1e-6);
    }

    #[test]
    fn fft_matches_momentum_form() {
        let g = Grid1D::for_sigma(1.0).unwrap();
        let (x, k) = gaussian_mode(1.0, &g).unwrap();
        let kk = fourier_transform(&x).unwrap();
        let l2: f64 = kk.values.iter().zip(&k.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(l2 < 1e-6, "L2 distance {l2}");
        let back = fourier_transform_to(&kk, &g).unwrap();
        assert!(fidelity(&back, &x).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn zero_pump_momentum_gives_the_fiber_mode() {
        let g = Grid1D::for_sigma(1.0).unwrap();
        let (x, _) = gaussian_mode(1.0, &g).unwrap();
        let h = herald_signal(0.0, 1.0, &g).unwrap();
        assert!(fidelity(&h, &x).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn aliasing_is_detected() {
        let g = Grid1D::symmetric(8.0, 64).unwrap();
        assert!(herald_signal(20.0, 1.0, &g).is_err());
    }

    #[test]
    fn fidelity_edge_cases() {
        let g = Grid1D::symmetric(8.0, 257).unwrap();
        let even = Wavefunction1D::new(
            Basis::Position,
            g,
            g.samples().iter().map(|x| Complex64::new((-x * x).exp(), 0.0)).collect(),
        )
        .unwrap();
        let odd = Wavefunction1D::new(
            Basis::Position,
            g,
            g.samples().iter().map(|x| Complex64::new(x * (-x * x).exp(), 0.0)).collect(),
        )
        .unwrap();
        assert_relative_eq!(fidelity(&even, &even).unwrap(), 1.0, epsilon = 1e-12);
        assert!(fidelity(&even, &odd).unwrap() < 1e-20);
        let other = Grid1D::symmetric(9.0, 257).unwrap();
        let moved = Wavefunction1D { grid: other, ..even.clone() };
        assert!(fidelity(&even, &moved).is_err());
    }
}
