//! Schmidt decomposition of discretized joint amplitudes, purity, and the
//! pump-waist and collection-angle purity scans.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpdcError};
use crate::joint_amplitude::{
    joint_angular, spectral_spatial_batch, CollectionMode, GridSpec, IntensityGrid, JointAmplitude, PartnerMode,
    Photon, PumpSpec, SpatialFilter,
};
use crate::par::{map_slice, pairwise_sum};
use crate::phasematching::InteractionSpec;

/// What the decomposed matrix holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSource {
    /// A complex joint amplitude.
    Amplitude,
    /// `sqrt(I)` of an intensity map, so that `|M|^2 = I`.
    SqrtIntensity,
    /// The intensity map itself, decomposed as if it were an amplitude.
    IntensityAsAmplitude,
}

/// How an intensity map is turned into a matrix for decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntensityPath {
    #[default]
    SqrtIntensity,
    IntensityAsAmplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    /// Nonincreasing Schmidt weights summing to one.
    pub coefficients: Vec<f64>,
    pub purity: f64,
    pub schmidt_number: f64,
    pub source: GridSource,
}

impl SchmidtSpectrum {
    fn from_singular_values(mut s: Vec<f64>, source: GridSource) -> Result<Self> {
        if s.iter().any(|v| !v.is_finite()) {
            return Err(SpdcError::Convergence("SVD produced non-finite singular values".into()));
        }
        s.sort_by(|a, b| b.total_cmp(a));
        let sq: Vec<f64> = s.iter().map(|v| v * v).collect();
        let total = pairwise_sum(&sq);
        if !(total > 0.0) {
            return Err(SpdcError::domain("cannot decompose a zero matrix"));
        }
        let coefficients: Vec<f64> = sq.iter().map(|v| v / total).collect();
        let p: Vec<f64> = coefficients.iter().map(|l| l * l).collect();
        let purity = pairwise_sum(&p);
        Ok(Self {
            coefficients,
            purity,
            schmidt_number: 1.0 / purity,
            source,
        })
    }
}

fn check_finite<'a>(mut it: impl Iterator<Item = &'a f64>) -> Result<()> {
    if it.any(|v| !v.is_finite()) {
        return Err(SpdcError::domain("matrix has non-finite entries"));
    }
    Ok(())
}

pub fn schmidt_decompose_complex(m: &DMatrix<Complex64>) -> Result<SchmidtSpectrum> {
    check_finite(m.iter().flat_map(|z| [&z.re, &z.im]))?;
    if m.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(SpdcError::domain("cannot decompose a zero matrix"));
    }
    let s = m.clone().singular_values();
    SchmidtSpectrum::from_singular_values(s.iter().copied().collect(), GridSource::Amplitude)
}

pub fn schmidt_decompose_real(m: &DMatrix<f64>, source: GridSource) -> Result<SchmidtSpectrum> {
    check_finite(m.iter())?;
    if m.iter().all(|v| *v == 0.0) {
        return Err(SpdcError::domain("cannot decompose a zero matrix"));
    }
    let s = m.clone().singular_values();
    SchmidtSpectrum::from_singular_values(s.iter().copied().collect(), source)
}

/// Schmidt spectrum of a joint amplitude.
pub fn schmidt_decompose(amp: &JointAmplitude) -> Result<SchmidtSpectrum> {
    if amp.values.iter().all(|z| z.im == 0.0) {
        let m = DMatrix::from_row_iterator(amp.nx(), amp.ny(), amp.values.iter().map(|z| z.re));
        let mut s = schmidt_decompose_real(&m, GridSource::Amplitude)?;
        s.source = GridSource::Amplitude;
        return Ok(s);
    }
    schmidt_decompose_complex(&amp.to_matrix())
}

/// Schmidt spectrum of an intensity map treated as a wavefunction.
pub fn schmidt_decompose_intensity(grid: &IntensityGrid, path: IntensityPath) -> Result<SchmidtSpectrum> {
    match path {
        IntensityPath::SqrtIntensity => schmidt_decompose_real(&grid.sqrt_amplitude(), GridSource::SqrtIntensity),
        IntensityPath::IntensityAsAmplitude => {
            schmidt_decompose_real(&grid.to_matrix(), GridSource::IntensityAsAmplitude)
        }
    }
}

/// `Tr(rho^2)` of `rho = M M^dagger / Tr(M M^dagger)`, without any SVD.
pub fn trace_purity(m: &DMatrix<Complex64>) -> f64 {
    let rho = m * m.adjoint();
    let tr: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
    let fro: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    fro / (tr * tr)
}

/// One point of a purity scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: f64,
    pub purity: f64,
}

/// Purity of the joint angular amplitude for each pump waist (m), in input
/// order.
pub fn purity_vs_pump_waist(
    spec: &InteractionSpec,
    pump: &PumpSpec,
    waists: &[f64],
    grid: &GridSpec,
) -> Result<Vec<ScanPoint>> {
    if waists.is_empty() {
        return Err(SpdcError::domain("empty waist list"));
    }
    for w in waists {
        crate::error::require_positive("pump waist", *w)?;
    }
    map_slice(waists, |&w| {
        let amp = joint_angular(spec, &pump.with_waist(w), grid)?;
        Ok(ScanPoint {
            x: w,
            purity: schmidt_decompose(&amp)?.purity,
        })
    })
    .into_iter()
    .collect()
}

/// Default idler-to-signal acceptance ratio used by the collection scan.
pub const COLLECTION_SCAN_RATIO: f64 = 2.0;

/// Purity of the collected signal spectral-spatial map for each full signal
/// acceptance angle (rad); the idler acceptance is `ratio` times wider.
pub fn purity_vs_collection(
    spec: &InteractionSpec,
    pump: &PumpSpec,
    angles: &[f64],
    ratio: f64,
    grid: &GridSpec,
    path: IntensityPath,
) -> Result<Vec<ScanPoint>> {
    if angles.is_empty() {
        return Err(SpdcError::domain("empty collection angle list"));
    }
    crate::error::require_positive("idler/signal acceptance ratio", ratio)?;
    let filters: Vec<SpatialFilter> = angles
        .iter()
        .map(|&a| {
            Ok(SpatialFilter {
                own: Some(CollectionMode::new(spec.lambda_s, a)?),
                partner: Some(CollectionMode::new(spec.lambda_i, ratio * a)?),
            })
        })
        .collect::<Result<_>>()?;
    let maps = spectral_spatial_batch(spec, pump, Photon::Signal, grid, PartnerMode::Trace, &filters)?;
    angles
        .iter()
        .zip(&maps)
        .map(|(&a, m)| {
            Ok(ScanPoint {
                x: a,
                purity: schmidt_decompose_intensity(m, path)?.purity,
            })
        })
        .collect()
}
