//! Run configuration files. Everything is validated, with the offending key
//! path in the message, before any computation starts.

use std::path::Path;

use serde::Deserialize;

use pairsource_core::designer::{IdlerRule, LensCatalog, DEFAULT_PLATEAU_FRACTION, DEFAULT_XI};
use pairsource_core::dispersion::{Catalog, CrystalSpec};
use pairsource_core::joint_amplitude::{GridSpec, PumpRegime};
use pairsource_core::phasematching::FieldPolarizations;
use pairsource_core::schmidt::{IntensityPath, COLLECTION_SCAN_RATIO};

use crate::CliError;

pub const CONFIG_SCHEMA: &str = "pairsource.config/1";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    /// Catalog name, or a full inline crystal entry.
    pub crystal: serde_json::Value,
    #[serde(default)]
    pub interaction: Option<InteractionBlock>,
    #[serde(default)]
    pub pump: PumpBlock,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub jsa: JsaBlock,
    #[serde(default)]
    pub scan: Option<ScanBlock>,
    #[serde(default)]
    pub design: DesignBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionBlock {
    pub lambda_p: f64,
    pub lambda_s: f64,
    #[serde(default)]
    pub polarization: Option<FieldPolarizations>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpBlock {
    pub regime: Option<PumpRegime>,
    pub waist: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum JsaKind {
    /// Joint spectral amplitude at collinear emission.
    #[default]
    Spectral,
    /// Joint angular amplitude at the centre wavelengths.
    Angular,
    /// Spectral-spatial intensity of one photon.
    SpectralSpatial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PhotonArg {
    #[default]
    Signal,
    Idler,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsaBlock {
    #[serde(default)]
    pub kind: JsaKind,
    #[serde(default)]
    pub photon: PhotonArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// Joint angular purity against pump waist (m).
    PumpWaist,
    /// Collected spectral-spatial purity against full signal acceptance (rad).
    Collection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub kind: ScanKind,
    pub values: Vec<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default)]
    pub path: IntensityPath,
}

fn default_ratio() -> f64 {
    COLLECTION_SCAN_RATIO
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignBlock {
    pub xi_target: f64,
    pub plateau_fraction: f64,
    pub idler_rule: IdlerRule,
    pub lens_catalog: Option<LensCatalog>,
}

impl Default for DesignBlock {
    fn default() -> Self {
        Self {
            xi_target: DEFAULT_XI,
            plateau_fraction: DEFAULT_PLATEAU_FRACTION,
            idler_rule: IdlerRule::default(),
            lens_catalog: None,
        }
    }
}

impl RunConfig {
    /// Defaults for a catalog crystal, used when no file is given.
    pub fn for_crystal(name: &str) -> Self {
        Self {
            schema: CONFIG_SCHEMA.to_string(),
            crystal: serde_json::Value::String(name.to_string()),
            interaction: None,
            pump: PumpBlock::default(),
            grid: GridSpec::default(),
            jsa: JsaBlock::default(),
            scan: None,
            design: DesignBlock::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| CliError::Input(format!("config key `{}`: {}", e.path(), e.inner())))?;
        if cfg.schema != CONFIG_SCHEMA {
            return Err(CliError::Input(format!(
                "config key `schema`: expected \"{CONFIG_SCHEMA}\", got \"{}\"",
                cfg.schema
            )));
        }
        cfg.crystal_spec(&Catalog::builtin()).map(|_| cfg)
    }

    pub fn crystal_spec(&self, catalog: &Catalog) -> Result<CrystalSpec, CliError> {
        match &self.crystal {
            serde_json::Value::String(name) => Ok(catalog.get(name)?.clone()),
            v @ serde_json::Value::Object(_) => {
                let spec: CrystalSpec = serde_path_to_error::deserialize(v.clone())
                    .map_err(|e| CliError::Input(format!("config key `crystal.{}`: {}", e.path(), e.inner())))?;
                spec.validate()?;
                Ok(spec)
            }
            _ => Err(CliError::Input(
                "config key `crystal`: expected a catalog name or a crystal object".into(),
            )),
        }
    }
}
