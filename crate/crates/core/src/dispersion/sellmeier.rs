use serde::{Deserialize, Serialize};

use crate::error::{Result, SpdcError};

/// Functional form of a Sellmeier set. Wavelengths are in micrometres inside
/// every form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SellmeierForm {
    /// `n^2 = 1 + sum_j B_j l^2 / (l^2 - C_j)`; coefficients `[B1, C1, B2, C2, ...]`.
    Standard,
    /// `n^2 = A + sum_j B_j / (l^2 - C_j) - D l^2`; coefficients `[A, D, B1, C1, ...]`.
    Pole,
    /// Temperature-dependent two-pole form used for LiNbO3 fits:
    /// `n^2 = a1 + b1 f + (a2 + b2 f)/(l^2 - (a3 + b3 f)^2) + (a4 + b4 f)/(l^2 - a5^2) - a6 l^2`
    /// with `f = (T - 24.5)(T + 570.82)`; coefficients `[a1..a6, b1..b4]`.
    TemperaturePole,
}

/// Sellmeier coefficients for one polarization axis of a crystal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierSet {
    pub axis: String,
    pub form: SellmeierForm,
    pub coefficients: Vec<f64>,
    /// Validity interval in metres.
    pub valid_range: [f64; 2],
    pub source: String,
}

impl SellmeierSet {
    pub fn validate(&self) -> Result<()> {
        let n = self.coefficients.len();
        let ok = match self.form {
            SellmeierForm::Standard => n >= 2 && n % 2 == 0,
            SellmeierForm::Pole => n >= 2 && n % 2 == 0,
            SellmeierForm::TemperaturePole => n == 10,
        };
        if !ok {
            return Err(SpdcError::Catalog(format!(
                "axis {}: {} coefficients do not fit form {:?}",
                self.axis, n, self.form
            )));
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(SpdcError::Catalog(format!("axis {}: non-finite coefficient", self.axis)));
        }
        let [lo, hi] = self.valid_range;
        if !(lo > 0.0 && hi > lo) {
            return Err(SpdcError::Catalog(format!(
                "axis {}: empty valid range [{lo}, {hi}]",
                self.axis
            )));
        }
        Ok(())
    }

    /// `n^2` at wavelength `lambda_m` (metres) and temperature in degrees Celsius.
    pub fn n_squared(&self, lambda_m: f64, temperature_c: f64) -> f64 {
        let l2 = (lambda_m * 1e6).powi(2);
        let c = &self.coefficients;
        match self.form {
            SellmeierForm::Standard => {
                1.0 + c
                    .chunks_exact(2)
                    .map(|p| p[0] * l2 / (l2 - p[1]))
                    .sum::<f64>()
            }
            SellmeierForm::Pole => {
                c[0] - c[1] * l2 + c[2..].chunks_exact(2).map(|p| p[0] / (l2 - p[1])).sum::<f64>()
            }
            SellmeierForm::TemperaturePole => {
                let f = (temperature_c - 24.5) * (temperature_c + 570.82);
                let pole1 = c[2] + c[8] * f;
                c[0] + c[6] * f + (c[1] + c[7] * f) / (l2 - pole1 * pole1)
                    + (c[3] + c[9] * f) / (l2 - c[4] * c[4])
                    - c[5] * l2
            }
        }
    }
}
