//! Crystal catalog, Sellmeier refractive indices, wavevector magnitudes and
//! Gaussian-beam focusing conversions.

mod beam;
mod catalog;
mod sellmeier;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub use beam::{angle_from_waist, focusing_parameter, rayleigh_range, waist_from_angle, BeamGeometry};
pub use catalog::Catalog;
pub use sellmeier::{SellmeierForm, SellmeierSet};

use crate::error::{Result, SpdcError};
use crate::joint_amplitude::PumpRegime;
use crate::phasematching::InteractionTemplate;

pub const CRYSTAL_SCHEMA: &str = "pairsource.crystal/1";
pub const DEFAULT_TEMPERATURE_C: f64 = 25.0;

/// How phasematching is achieved in a crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmType {
    Type0Qpm,
    Type1Angle,
    Type2Qpm,
}

impl PmType {
    pub fn is_qpm(self) -> bool {
        matches!(self, PmType::Type0Qpm | PmType::Type2Qpm)
    }
}

/// Default pump settings stored with a catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpDefaults {
    pub regime: PumpRegime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waist: Option<f64>,
}

/// Geometry and working-point defaults of a catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalDefaults {
    /// Crystal length in metres.
    pub length: f64,
    /// Transverse aperture (m x m).
    pub cross_section: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poling_period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionTemplate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpDefaults>,
}

/// One nonlinear crystal: dispersion data, geometry and phasematching type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSpec {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub name: String,
    pub pm_type: PmType,
    /// Wavelength interval (m) over which the entry may be evaluated.
    pub transparency_range: [f64; 2],
    pub sellmeier: Vec<SellmeierSet>,
    pub defaults: CrystalDefaults,
}

fn default_schema() -> String {
    CRYSTAL_SCHEMA.to_string()
}

impl CrystalSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: CrystalSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// A crystal whose axes have wavelength-independent indices. Useful for
    /// synthetic checks.
    pub fn with_constant_indices(name: &str, pm_type: PmType, indices: &[(&str, f64)], length: f64) -> Self {
        let range = [1e-8, 1e-3];
        CrystalSpec {
            schema: default_schema(),
            name: name.to_string(),
            pm_type,
            transparency_range: range,
            sellmeier: indices
                .iter()
                .map(|&(axis, n)| SellmeierSet {
                    axis: axis.to_string(),
                    form: SellmeierForm::Pole,
                    coefficients: vec![n * n, 0.0],
                    valid_range: range,
                    source: "synthetic constant index".into(),
                })
                .collect(),
            defaults: CrystalDefaults {
                length,
                cross_section: [1e-2, 1e-2],
                temperature: None,
                poling_period: None,
                interaction: None,
                pump: None,
            },
        }
    }

    pub fn length(&self) -> f64 {
        self.defaults.length
    }

    pub fn temperature(&self) -> f64 {
        self.defaults.temperature.unwrap_or(DEFAULT_TEMPERATURE_C)
    }

    pub fn cross_section(&self) -> [f64; 2] {
        self.defaults.cross_section
    }

    pub fn poling_period(&self) -> Option<f64> {
        self.defaults.poling_period
    }

    pub fn axes(&self) -> impl Iterator<Item = &str> {
        self.sellmeier.iter().map(|s| s.axis.as_str())
    }

    fn set_for(&self, axis: &str) -> Result<&SellmeierSet> {
        self.sellmeier.iter().find(|s| s.axis == axis).ok_or_else(|| {
            SpdcError::domain(format!(
                "crystal {} has no Sellmeier set for axis `{axis}` (available: {})",
                self.name,
                self.axes().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    /// Structural checks plus a 50-point index sweep on every axis.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SpdcError::Catalog(format!("{}: {msg}", self.name)));
        if self.schema != CRYSTAL_SCHEMA {
            return bad(format!("unsupported schema `{}`", self.schema));
        }
        if self.name.trim().is_empty() {
            return Err(SpdcError::Catalog("crystal name is empty".into()));
        }
        let [lo, hi] = self.transparency_range;
        if !(lo > 0.0 && hi > lo) {
            return bad(format!("empty transparency range [{lo}, {hi}]"));
        }
        if !(self.defaults.length > 0.0 && self.defaults.length.is_finite()) {
            return bad(format!("length must be positive, got {}", self.defaults.length));
        }
        if self.defaults.cross_section.iter().any(|&c| !(c > 0.0)) {
            return bad("cross section must be positive".into());
        }
        if let Some(p) = self.defaults.poling_period {
            if !(p > 0.0) {
                return bad(format!("poling period must be positive, got {p}"));
            }
        }
        if self.sellmeier.is_empty() {
            return bad("no Sellmeier sets".into());
        }
        for (i, set) in self.sellmeier.iter().enumerate() {
            set.validate()?;
            if self.sellmeier[..i].iter().any(|s| s.axis == set.axis) {
                return bad(format!("duplicate axis `{}`", set.axis));
            }
            let a = lo.max(set.valid_range[0]);
            let b = hi.min(set.valid_range[1]);
            if b <= a {
                return bad(format!("axis {} valid range misses the transparency range", set.axis));
            }
            for k in 0..50 {
                let lambda = a + (b - a) * k as f64 / 49.0;
                let n2 = set.n_squared(lambda, self.temperature());
                let n = n2.sqrt();
                if !(n.is_finite() && (1.0..=3.5).contains(&n)) {
                    return bad(format!("axis {} index {n} at {lambda:e} m outside [1, 3.5]", set.axis));
                }
            }
        }
        Ok(())
    }
}

/// Refractive index of `axis` at vacuum wavelength `wavelength` (m).
pub fn refractive_index(crystal: &CrystalSpec, axis: &str, wavelength: f64) -> Result<f64> {
    let set = crystal.set_for(axis)?;
    let lo = crystal.transparency_range[0].max(set.valid_range[0]);
    let hi = crystal.transparency_range[1].min(set.valid_range[1]);
    if !(wavelength >= lo && wavelength <= hi) {
        return Err(SpdcError::OutsideTransparency {
            crystal: crystal.name.clone(),
            axis: axis.to_string(),
            wavelength,
            min: lo,
            max: hi,
        });
    }
    Ok(set.n_squared(wavelength, crystal.temperature()).sqrt())
}

/// `k = 2 pi n(lambda) / lambda` in rad/m.
pub fn wavevector_magnitude(crystal: &CrystalSpec, axis: &str, wavelength: f64) -> Result<f64> {
    Ok(TAU * refractive_index(crystal, axis, wavelength)? / wavelength)
}
