//! Heralding efficiencies: reduction of measured count rates, and model
//! predictions from the overlap of a joint angular amplitude with Gaussian
//! fiber modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpdcError};
use crate::joint_amplitude::{CollectionMode, JointAmplitude};
use crate::par::pairwise_sum;

/// Efficiencies above this are reported as an inconsistent calibration.
pub const CALIBRATION_FLAG: f64 = 1.05;

/// Singles probability below which a collection mode is taken to miss the
/// amplitude entirely.
pub const DEGENERATE_FLOOR: f64 = 1e-12;

/// Measured rates (Hz), detector efficiencies and path transmissions of both
/// arms. Noise rates are subtracted from the singles only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountRecord {
    pub coincidences: f64,
    pub singles_signal: f64,
    pub singles_idler: f64,
    pub detector_efficiency_signal: f64,
    pub detector_efficiency_idler: f64,
    pub transmission_signal: f64,
    pub transmission_idler: f64,
    #[serde(default)]
    pub noise_signal: f64,
    #[serde(default)]
    pub noise_idler: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    /// Probability that the signal is collected given a detected idler.
    pub mu_signal: f64,
    /// Probability that the idler is collected given a detected signal.
    pub mu_idler: f64,
    /// Geometric mean of the two.
    pub mu_symmetric: f64,
    /// Set when an efficiency exceeds [`CALIBRATION_FLAG`].
    pub inconsistent_calibration: bool,
    pub warnings: Vec<String>,
}

impl EfficiencyReport {
    fn new(mu_signal: f64, mu_idler: f64) -> Self {
        let mut warnings = Vec::new();
        for (name, mu) in [("signal", mu_signal), ("idler", mu_idler)] {
            if mu > CALIBRATION_FLAG {
                warnings.push(format!(
                    "{name} heralding efficiency {mu:.3} exceeds {CALIBRATION_FLAG}: check efficiencies and transmissions"
                ));
            }
        }
        Self {
            mu_signal,
            mu_idler,
            mu_symmetric: (mu_signal * mu_idler).sqrt(),
            inconsistent_calibration: !warnings.is_empty(),
            warnings,
        }
    }
}

fn check_rate(what: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(SpdcError::domain(format!("{what} must be a finite rate >= 0, got {v}")));
    }
    Ok(())
}

fn check_fraction(what: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(SpdcError::domain(format!("{what} must lie in (0, 1], got {v}")));
    }
    Ok(())
}

/// Heralding efficiency of one arm: `C / ((S_herald - noise) eta t)`, where
/// the singles are those of the heralding (partner) detector and `eta`, `t`
/// belong to the heralded arm.
pub fn single_arm_efficiency(
    coincidences: f64,
    herald_singles: f64,
    herald_noise: f64,
    detector_efficiency: f64,
    transmission: f64,
) -> Result<f64> {
    check_rate("coincidence rate", coincidences)?;
    check_rate("singles rate", herald_singles)?;
    check_rate("noise rate", herald_noise)?;
    check_fraction("detector efficiency", detector_efficiency)?;
    check_fraction("transmission", transmission)?;
    let s = herald_singles - herald_noise;
    if !(s > 0.0) {
        return Err(SpdcError::domain(format!(
            "noise-subtracted singles must be positive, got {s}"
        )));
    }
    if coincidences > s {
        return Err(SpdcError::domain(format!(
            "coincidences {coincidences} exceed noise-subtracted singles {s}"
        )));
    }
    Ok(coincidences / (s * detector_efficiency * transmission))
}

/// Reduce a full count record to heralding efficiencies.
pub fn counts_to_efficiency(rec: &CountRecord) -> Result<EfficiencyReport> {
    let mu_signal = single_arm_efficiency(
        rec.coincidences,
        rec.singles_idler,
        rec.noise_idler,
        rec.detector_efficiency_signal,
        rec.transmission_signal,
    )?;
    let mu_idler = single_arm_efficiency(
        rec.coincidences,
        rec.singles_signal,
        rec.noise_signal,
        rec.detector_efficiency_idler,
        rec.transmission_idler,
    )?;
    Ok(EfficiencyReport::new(mu_signal, mu_idler))
}

/// Model-level coupling probabilities per generated pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// `|<u_s u_i|Phi>|^2`.
    pub coincidence_probability: f64,
    /// Probability that the signal alone is found in its mode.
    pub singles_signal: f64,
    pub singles_idler: f64,
    pub efficiencies: EfficiencyReport,
}

/// Overlap of a unit-norm joint angular amplitude (signal rows, idler
/// columns) with Gaussian collection modes on each arm.
pub fn overlap_efficiencies(
    amp: &JointAmplitude,
    mode_s: &CollectionMode,
    mode_i: &CollectionMode,
) -> Result<OverlapReport> {
    let us = mode_s.discrete_mode(&amp.axis_x)?;
    let ui = mode_i.discrete_mode(&amp.axis_y)?;
    let (nx, ny) = (amp.nx(), amp.ny());
    let norm = amp.norm_sqr();
    if !(norm > 0.0) {
        return Err(SpdcError::domain("amplitude has zero norm"));
    }

    // Idler-side amplitude after projecting the signal, and vice versa.
    let proj_s: Vec<Complex64> = (0..ny)
        .map(|iy| (0..nx).map(|ix| amp.get(ix, iy) * us[ix]).sum())
        .collect();
    let proj_i: Vec<Complex64> = (0..nx)
        .map(|ix| (0..ny).map(|iy| amp.get(ix, iy) * ui[iy]).sum())
        .collect();
    let r_s = pairwise_sum(&proj_s.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()) / norm;
    let r_i = pairwise_sum(&proj_i.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()) / norm;
    if r_s < DEGENERATE_FLOOR {
        return Err(SpdcError::DegenerateCoupling { arm: "signal", value: r_s });
    }
    if r_i < DEGENERATE_FLOOR {
        return Err(SpdcError::DegenerateCoupling { arm: "idler", value: r_i });
    }
    let overlap: Complex64 = proj_s.iter().zip(&ui).map(|(z, u)| z * u).sum();
    let c = overlap.norm_sqr() / norm;
    Ok(OverlapReport {
        coincidence_probability: c,
        singles_signal: r_s,
        singles_idler: r_i,
        efficiencies: EfficiencyReport::new(c / r_i, c / r_s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn measured_idler_efficiency() {
        // 1550 nm arm heralded by the 810 nm singles.
        let mu = single_arm_efficiency(7.0e3, 39.0e3, 0.0, 0.24, 0.87).unwrap();
        assert_relative_eq!(mu, 0.860, epsilon = 1e-3);
    }

    #[test]
    fn measured_signal_efficiency() {
        let mu = single_arm_efficiency(0.9e3, 3.2e3, 0.0, 0.48, 0.78).unwrap();
        assert_relative_eq!(mu, 0.751, epsilon = 1e-3);
    }

    #[test]
    fn perfect_record() {
        let rec = CountRecord {
            coincidences: 1e3,
            singles_signal: 1e3,
            singles_idler: 1e3,
            detector_efficiency_signal: 1.0,
            detector_efficiency_idler: 1.0,
            transmission_signal: 1.0,
            transmission_idler: 1.0,
            noise_signal: 0.0,
            noise_idler: 0.0,
        };
        let r = counts_to_efficiency(&rec).unwrap();
        assert_eq!(r.mu_symmetric, 1.0);
        assert!(!r.inconsistent_calibration);
    }

    #[test]
    fn noise_is_subtracted_from_singles_only() {
        let mu = single_arm_efficiency(500.0, 1100.0, 100.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(mu, 0.5, epsilon = 1e-15);
        assert!(single_arm_efficiency(10.0, 100.0, 100.0, 0.5, 0.5).is_err());
        assert!(single_arm_efficiency(10.0, 100.0, 0.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn excess_efficiency_is_flagged_not_clamped() {
        let rec = CountRecord {
            coincidences: 900.0,
            singles_signal: 1000.0,
            singles_idler: 1000.0,
            detector_efficiency_signal: 0.5,
            detector_efficiency_idler: 1.0,
            transmission_signal: 1.0,
            transmission_idler: 1.0,
            noise_signal: 0.0,
            noise_idler: 0.0,
        };
        let r = counts_to_efficiency(&rec).unwrap();
        assert_relative_eq!(r.mu_signal, 1.8, epsilon = 1e-12);
        assert!(r.inconsistent_calibration);
        assert_eq!(r.warnings.len(), 1);
    }
}
