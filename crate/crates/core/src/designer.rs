//! The four-step source design: pump focusing from a target focusing
//! parameter, signal acceptance from the spectral-spatial plateau, idler
//! acceptance from the joint angular amplitude, and the resulting fiber
//! modes, efficiencies and relay lenses.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{angle_from_waist, focusing_parameter, waist_from_angle};
use crate::error::{require_positive, Result, SpdcError};
use crate::heralding::overlap_efficiencies;
use crate::joint_amplitude::{
    joint_angular, spectral_spatial, spectral_spatial_batch, CollectionMode, GridSpec, IntensityGrid,
    JointAmplitude, PartnerMode, Photon, PumpRegime, PumpSpec, SpatialFilter,
};
use crate::phasematching::{kz_mismatch_unchecked, InteractionSpec, PhaseMatchSolution};
use crate::schmidt::{schmidt_decompose_intensity, IntensityPath};
use crate::SPEED_OF_LIGHT;

/// Pump focusing parameter of the default design.
pub const DEFAULT_XI: f64 = 0.02;
/// Default plateau criterion: mean-wavelength spread as a fraction of the
/// phasematching bandwidth.
pub const DEFAULT_PLATEAU_FRACTION: f64 = 0.025;
/// `sinc^2(x) = 1/2` at this `x`.
const SINC2_HALF: f64 = 1.391_557_377_262_770_4;
/// Lens relays below this fiber overlap are not suggested.
pub const MIN_LENS_OVERLAP: f64 = 0.5;

/// Full width at half maximum of `y(x)` with linear interpolation at both
/// crossings.
pub fn fwhm(x: &[f64], y: &[f64]) -> Result<f64> {
    let (imax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| SpdcError::domain("empty profile"))?;
    if !(ymax > 0.0) {
        return Err(SpdcError::domain("profile has no positive maximum"));
    }
    let half = 0.5 * ymax;
    let cross = |a: usize, b: usize| x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
    let mut lo = imax;
    while lo > 0 && y[lo - 1] >= half {
        lo -= 1;
    }
    let left = if lo == 0 { x[0] } else { cross(lo - 1, lo) };
    let mut hi = imax;
    while hi + 1 < y.len() && y[hi + 1] >= half {
        hi += 1;
    }
    let right = if hi + 1 == y.len() { x[hi] } else { cross(hi + 1, hi) };
    Ok((right - left).abs())
}

/// Spectral bandwidth against which the plateau criterion is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlateauReference {
    /// A given bandwidth in the map's wavelength units.
    Bandwidth(f64),
    /// FWHM of the spectrum emitted at the central angle.
    Central,
    /// FWHM of the angle-integrated spectrum; grows with the angular window.
    Marginal,
}

/// Full width of the central angular window over which the conditional mean
/// wavelength of a spectral-spatial map stays within `fraction` of the
/// reference bandwidth. Rows are wavelengths, columns symmetric angles.
pub fn plateau_width(map: &IntensityGrid, fraction: f64, reference: PlateauReference) -> Result<f64> {
    require_positive("plateau fraction", fraction)?;
    let lam = &map.axis_x.samples;
    let theta = &map.axis_y.samples;
    let (nx, ny) = (map.nx(), map.ny());
    let band = match reference {
        PlateauReference::Bandwidth(b) => {
            require_positive("reference bandwidth", b)?;
            b
        }
        PlateauReference::Marginal => fwhm(lam, &map.marginal_x())?,
        PlateauReference::Central => {
            let (a, b) = if ny % 2 == 0 { (ny / 2 - 1, ny / 2) } else { (ny / 2, ny / 2) };
            let col: Vec<f64> = (0..nx).map(|r| map.get(r, a) + map.get(r, b)).collect();
            fwhm(lam, &col)?
        }
    };
    let threshold = fraction * band;
    let mean: Vec<f64> = (0..ny)
        .map(|c| {
            let w: f64 = (0..nx).map(|r| map.get(r, c)).sum();
            let m: f64 = (0..nx).map(|r| map.get(r, c) * lam[r]).sum();
            if w > 0.0 { m / w } else { f64::NAN }
        })
        .collect();
    // Column pairs moving outwards from the centre.
    let half = ny / 2;
    let pairs: Vec<(usize, usize)> = if ny % 2 == 0 {
        (0..half).map(|k| (half - 1 - k, half + k)).collect()
    } else {
        (0..=half).map(|k| (half - k, half + k)).collect()
    };
    let (mut lo_v, mut hi_v) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut prev: Option<(f64, f64)> = None;
    // The innermost pair has zero spread by symmetry; the plateau has to
    // survive at least one step beyond it.
    for (k, &(a, b)) in pairs.iter().enumerate() {
        for v in [mean[a], mean[b]] {
            if !v.is_finite() {
                return finish(prev, theta[b], f64::INFINITY, threshold);
            }
            lo_v = lo_v.min(v);
            hi_v = hi_v.max(v);
        }
        let spread = hi_v - lo_v;
        if spread >= threshold {
            return finish(prev, theta[b], spread, threshold);
        }
        if k > 0 {
            prev = Some((theta[b], spread));
        }
    }
    Ok(2.0 * theta[ny - 1])
}

fn finish(prev: Option<(f64, f64)>, t: f64, spread: f64, threshold: f64) -> Result<f64> {
    match prev {
        None => Err(SpdcError::Convergence(
            "no angular plateau: the mean wavelength shifts within one grid step; reduce the pump focusing".into(),
        )),
        Some((t0, s0)) => {
            let f = if spread.is_finite() { (threshold - s0) / (spread - s0) } else { 0.0 };
            Ok(2.0 * (t0 + f * (t - t0)))
        }
    }
}

/// Pump waist for a target focusing parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpChoice {
    pub waist: f64,
    pub xi: f64,
    pub angular_spread: f64,
    /// 1/e^2 beam diameter at the crystal faces.
    pub face_diameter: f64,
    pub warnings: Vec<String>,
}

/// `w_p = sqrt(lambda_p L / (2 pi xi))`. A beam wider than `aperture` at the
/// crystal faces is reported as a warning.
pub fn choose_pump_waist(lambda_p: f64, length: f64, xi_target: f64, aperture: Option<f64>) -> Result<PumpChoice> {
    require_positive("pump wavelength", lambda_p)?;
    require_positive("crystal length", length)?;
    require_positive("target focusing parameter", xi_target)?;
    let waist = (lambda_p * length / (2.0 * PI * xi_target)).sqrt();
    let xi = focusing_parameter(lambda_p, length, waist)?;
    let face_diameter = 2.0 * waist * (1.0 + xi * xi).sqrt();
    let mut warnings = Vec::new();
    if let Some(a) = aperture {
        if face_diameter > a {
            warnings.push(format!(
                "pump 1/e^2 diameter at the crystal faces ({:.1} um) exceeds the aperture ({:.1} um)",
                face_diameter * 1e6,
                a * 1e6
            ));
        }
    }
    Ok(PumpChoice {
        waist,
        xi,
        angular_spread: angle_from_waist(lambda_p, waist)?,
        face_diameter,
        warnings,
    })
}

/// Wavelength FWHM of one photon's spectrum for a monochromatic pump at
/// the central emission angle: `sinc^2(dk(nu, -nu) L / 2)`.
pub fn phasematching_bandwidth(spec: &InteractionSpec, photon: Photon) -> Result<f64> {
    let (gk, length) = (spec.grating_wavevector(), spec.length());
    let f0 = SPEED_OF_LIGHT / spec.lambda_s.min(spec.lambda_i);
    let phase = |nu: f64| -> Result<f64> {
        let k = spec.wavevectors(nu, -nu)?;
        Ok(0.5 * length * kz_mismatch_unchecked(&k, 0.0, 0.0, gk).abs())
    };
    let edge = |dir: f64| -> Result<f64> {
        let (mut lo, mut hi) = (0.0, 1e9);
        while phase(dir * hi)? < SINC2_HALF {
            lo = hi;
            hi *= 2.0;
            if hi > 0.2 * f0 {
                return Err(SpdcError::Convergence("phasematching bandwidth exceeds 20% of the carrier".into()));
            }
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if phase(dir * mid)? < SINC2_HALF {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(dir * 0.5 * (lo + hi))
    };
    let (up, down) = (edge(1.0)?, edge(-1.0)?);
    // Detuning of the signal; the idler carries the opposite sign.
    let (centre, a, b) = match photon {
        Photon::Signal => (SPEED_OF_LIGHT / spec.lambda_s, up, down),
        Photon::Idler => (SPEED_OF_LIGHT / spec.lambda_i, -up, -down),
    };
    Ok((SPEED_OF_LIGHT / (centre + a) - SPEED_OF_LIGHT / (centre + b)).abs())
}

/// Full signal acceptance angle: the plateau of the spectral-spatial map,
/// against the signal's phasematching bandwidth.
pub fn signal_collection_angle(map: &IntensityGrid, fraction: f64, bandwidth: f64) -> Result<f64> {
    require_positive("plateau fraction", fraction)?;
    plateau_width(map, fraction, PlateauReference::Bandwidth(bandwidth))
}

/// Rule turning the signal acceptance into an idler acceptance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdlerRule {
    /// Map the signal acceptance through the angular ridge: `|beta| dtheta_s`
    /// with `beta` the regression slope of idler on signal angle.
    #[default]
    RidgeTransfer,
    /// Full 1/e^2 width (four standard deviations) of the idler angle
    /// distribution conditioned on the Gaussian signal acceptance.
    TotalSpread,
}

/// Idler acceptance angle for a given signal acceptance `delta_theta_s`.
pub fn idler_collection_angle(amp: &JointAmplitude, delta_theta_s: f64, rule: IdlerRule) -> Result<f64> {
    require_positive("signal acceptance", delta_theta_s)?;
    if !amp.axis_x.variable.is_angle() || !amp.axis_y.variable.is_angle() {
        return Err(SpdcError::domain("idler acceptance needs a joint angular amplitude"));
    }
    let mode = CollectionMode::new(1.0, delta_theta_s)?;
    let ts = &amp.axis_x.samples;
    let ti = &amp.axis_y.samples;
    let (mut w0, mut ms, mut mi) = (0.0, 0.0, 0.0);
    let mut weights = vec![0.0; amp.values.len()];
    for (ix, &a) in ts.iter().enumerate() {
        let us2 = mode.profile(a).powi(2);
        for (iy, &b) in ti.iter().enumerate() {
            let w = us2 * amp.get(ix, iy).norm_sqr();
            weights[ix * ti.len() + iy] = w;
            w0 += w;
            ms += w * a;
            mi += w * b;
        }
    }
    if !(w0 > 1e-12 * amp.norm_sqr()) {
        return Err(SpdcError::DegenerateCoupling { arm: "idler", value: w0 });
    }
    ms /= w0;
    mi /= w0;
    let (mut css, mut csi, mut cii) = (0.0, 0.0, 0.0);
    for (ix, &a) in ts.iter().enumerate() {
        for (iy, &b) in ti.iter().enumerate() {
            let w = weights[ix * ti.len() + iy];
            css += w * (a - ms) * (a - ms);
            csi += w * (a - ms) * (b - mi);
            cii += w * (b - mi) * (b - mi);
        }
    }
    match rule {
        IdlerRule::RidgeTransfer => {
            if !(css > 0.0) {
                return Err(SpdcError::DegenerateCoupling { arm: "signal", value: css });
            }
            Ok((csi / css).abs() * delta_theta_s)
        }
        IdlerRule::TotalSpread => Ok(4.0 * (cii / w0).sqrt()),
    }
}

/// A two-lens relay: collimating focal length, then focusing focal length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensPair {
    pub collimating: f64,
    pub focusing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LensSuggestion {
    pub arm: String,
    pub fiber_mfd: f64,
    pub collimating: f64,
    pub focusing: f64,
    /// Predicted 1/e^2 beam radius at the fiber facet.
    pub waist_at_fiber: f64,
    /// Power overlap with the fiber's Gaussian mode.
    pub overlap: f64,
}

/// Gaussian beam complex parameter `q` through an ABCD matrix.
fn abcd(q: Complex64, m: [[f64; 2]; 2]) -> Complex64 {
    (q * m[0][0] + m[0][1]) / (q * m[1][0] + m[1][1])
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn space(d: f64) -> [[f64; 2]; 2] {
    [[1.0, d], [0.0, 1.0]]
}

fn thin_lens(f: f64) -> [[f64; 2]; 2] {
    [[1.0, 0.0], [-1.0 / f, 1.0]]
}

/// Beam radius and wavefront curvature (1/R) from `q`.
fn beam_from_q(q: Complex64, wavelength: f64) -> (f64, f64) {
    let inv = q.inv();
    let w = (-wavelength / (PI * inv.im)).sqrt();
    (w, inv.re)
}

/// Propagate a waist `w0` placed at the front focal plane of the collimating
/// lens through a telescopic relay to the back focal plane of the focusing
/// lens. Returns the radius and curvature there.
pub fn relay_beam(w0: f64, wavelength: f64, pair: &LensPair) -> Result<(f64, f64)> {
    require_positive("waist", w0)?;
    require_positive("wavelength", wavelength)?;
    require_positive("collimating focal length", pair.collimating)?;
    require_positive("focusing focal length", pair.focusing)?;
    let z_r = PI * w0 * w0 / wavelength;
    let (f1, f2) = (pair.collimating, pair.focusing);
    let m = [space(f2), thin_lens(f2), space(f1 + f2), thin_lens(f1), space(f1)]
        .into_iter()
        .reduce(mat_mul)
        .expect("non-empty");
    Ok(beam_from_q(abcd(Complex64::new(0.0, z_r), m), wavelength))
}

/// Power overlap of two coaxial Gaussian beams of radii `w1`, `w2` and
/// curvatures `c1`, `c2` (1/R) at one plane.
pub fn gaussian_overlap(w1: f64, c1: f64, w2: f64, c2: f64, wavelength: f64) -> f64 {
    let a = w1 / w2 + w2 / w1;
    let b = PI * w1 * w2 / wavelength * (c1 - c2);
    4.0 / (a * a + b * b)
}

/// Rank relays by their overlap with a fiber mode of diameter `fiber_mfd`.
pub fn lens_suggestion(
    arm: &str,
    waist: f64,
    fiber_mfd: f64,
    wavelength: f64,
    candidates: &[LensPair],
) -> Result<(Vec<LensSuggestion>, Vec<String>)> {
    require_positive("fiber mode-field diameter", fiber_mfd)?;
    let w_f = 0.5 * fiber_mfd;
    let mut out = Vec::new();
    for pair in candidates {
        let (w, c) = relay_beam(waist, wavelength, pair)?;
        let overlap = gaussian_overlap(w, c, w_f, 0.0, wavelength);
        if overlap >= MIN_LENS_OVERLAP {
            out.push(LensSuggestion {
                arm: arm.to_string(),
                fiber_mfd,
                collimating: pair.collimating,
                focusing: pair.focusing,
                waist_at_fiber: w,
                overlap,
            });
        }
    }
    out.sort_by(|a, b| {
        b.overlap
            .total_cmp(&a.overlap)
            .then(a.collimating.total_cmp(&b.collimating))
            .then(a.focusing.total_cmp(&b.focusing))
    });
    let warnings = if out.is_empty() {
        vec![format!(
            "{arm}: no lens pair reaches {MIN_LENS_OVERLAP} overlap with the {:.2} um fiber mode",
            fiber_mfd * 1e6
        )]
    } else {
        Vec::new()
    };
    Ok((out, warnings))
}

/// Fiber and lens data for the relay suggestions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LensCatalog {
    pub fiber_mfd_signal: f64,
    pub fiber_mfd_idler: f64,
    pub pairs: Vec<LensPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignConfig {
    pub xi_target: f64,
    pub plateau_fraction: f64,
    pub idler_rule: IdlerRule,
    pub grid: GridSpec,
    pub lens_catalog: Option<LensCatalog>,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            xi_target: DEFAULT_XI,
            plateau_fraction: DEFAULT_PLATEAU_FRACTION,
            idler_rule: IdlerRule::default(),
            grid: GridSpec::default(),
            lens_catalog: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpReport {
    pub wavelength: f64,
    pub regime: PumpRegime,
    pub waist: f64,
    pub xi: f64,
    pub angular_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmReport {
    pub wavelength: f64,
    /// Full external 1/e^2 acceptance angle.
    pub angular_spread: f64,
    pub waist: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicted {
    pub mu_signal: f64,
    pub mu_idler: f64,
    pub mu_symmetric: f64,
    pub coincidence_probability: f64,
    pub spectral_spatial_purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub crystal: String,
    pub length: f64,
    pub phasematching: PhaseMatchSolution,
    pub pump: PumpReport,
    pub signal: ArmReport,
    pub idler: ArmReport,
    pub predicted: Predicted,
    pub lens_suggestions: Vec<LensSuggestion>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub settings: DesignConfig,
    /// Signal phasematching bandwidth used by the plateau criterion (m).
    pub plateau_reference_bandwidth: f64,
}

/// Intermediate functions of a design, for plotting.
#[derive(Debug, Clone)]
pub struct DesignCurves {
    pub spectral_spatial: IntensityGrid,
    pub joint_angular: JointAmplitude,
    pub collected_spectral_spatial: IntensityGrid,
}

/// Run the full design pipeline.
pub fn design(spec: &InteractionSpec, regime: PumpRegime, config: &DesignConfig) -> Result<DesignReport> {
    design_with_curves(spec, regime, config).map(|(r, _)| r)
}

pub fn design_with_curves(
    spec: &InteractionSpec,
    regime: PumpRegime,
    config: &DesignConfig,
) -> Result<(DesignReport, DesignCurves)> {
    let mut spec = spec.clone();
    let needs_solve = if spec.crystal.pm_type.is_qpm() {
        spec.grating.is_none()
    } else {
        spec.tuning_angle.is_none()
    };
    let phasematching = if needs_solve {
        spec.solve().map_err(|e| e.in_stage("phasematching"))?
    } else {
        PhaseMatchSolution {
            solution: match (spec.grating, spec.tuning_angle) {
                (Some(g), _) => crate::phasematching::PhaseMatch::Poling {
                    period: g.period,
                    orientation: g.orientation,
                },
                (None, Some(theta)) => crate::phasematching::PhaseMatch::Angle { theta },
                (None, None) => unreachable!("checked above"),
            },
            residual: spec.collinear_mismatch().map_err(|e| e.in_stage("phasematching"))?.abs(),
        }
    };
    let length = spec.length();
    let mut warnings = Vec::new();

    let aperture = spec.crystal.cross_section();
    let choice = choose_pump_waist(spec.lambda_p, length, config.xi_target, Some(aperture[0].min(aperture[1])))
        .map_err(|e| e.in_stage("pump_waist"))?;
    warnings.extend(choice.warnings.iter().cloned());
    let pump = PumpSpec::new(spec.lambda_p, regime, choice.waist).map_err(|e| e.in_stage("pump_waist"))?;

    let map = spectral_spatial(&spec, &pump, Photon::Signal, &config.grid, PartnerMode::Trace)
        .map_err(|e| e.in_stage("spectral_spatial"))?;
    let bandwidth = phasematching_bandwidth(&spec, Photon::Signal).map_err(|e| e.in_stage("signal_collection"))?;
    let dts = signal_collection_angle(&map, config.plateau_fraction, bandwidth)
        .map_err(|e| e.in_stage("signal_collection"))?;

    let ja = joint_angular(&spec, &pump, &config.grid).map_err(|e| e.in_stage("joint_angular"))?;
    let dti = idler_collection_angle(&ja, dts, config.idler_rule).map_err(|e| e.in_stage("idler_collection"))?;

    let arm = |lambda: f64, dt: f64| -> Result<ArmReport> {
        let waist = waist_from_angle(lambda, dt)?;
        Ok(ArmReport {
            wavelength: lambda,
            angular_spread: dt,
            waist,
            xi: focusing_parameter(lambda, length, waist)?,
        })
    };
    let signal = arm(spec.lambda_s, dts).map_err(|e| e.in_stage("collection_waists"))?;
    let idler = arm(spec.lambda_i, dti).map_err(|e| e.in_stage("collection_waists"))?;

    let mode_s = CollectionMode::new(spec.lambda_s, dts).map_err(|e| e.in_stage("overlap"))?;
    let mode_i = CollectionMode::new(spec.lambda_i, dti).map_err(|e| e.in_stage("overlap"))?;
    let overlap = overlap_efficiencies(&ja, &mode_s, &mode_i).map_err(|e| e.in_stage("overlap"))?;
    warnings.extend(overlap.efficiencies.warnings.iter().cloned());

    let filter = SpatialFilter {
        own: Some(mode_s),
        partner: Some(mode_i),
    };
    let collected = spectral_spatial_batch(&spec, &pump, Photon::Signal, &config.grid, PartnerMode::Trace, &[filter])
        .map_err(|e| e.in_stage("collected_purity"))?
        .remove(0);
    let purity = schmidt_decompose_intensity(&collected, IntensityPath::SqrtIntensity)
        .map_err(|e| e.in_stage("collected_purity"))?
        .purity;

    if choice.angular_spread >= 0.5 * dts {
        warnings.push(format!(
            "pump divergence {:.2e} rad is not below half the signal acceptance {:.2e} rad; focus the pump less",
            choice.angular_spread, dts
        ));
    }

    let mut lens_suggestions = Vec::new();
    if let Some(cat) = &config.lens_catalog {
        for (name, w, mfd, lambda) in [
            ("signal", signal.waist, cat.fiber_mfd_signal, spec.lambda_s),
            ("idler", idler.waist, cat.fiber_mfd_idler, spec.lambda_i),
        ] {
            let (s, w) = lens_suggestion(name, w, mfd, lambda, &cat.pairs).map_err(|e| e.in_stage("lens"))?;
            lens_suggestions.extend(s);
            warnings.extend(w);
        }
    }

    let notes = vec![format!(
        "align the collection optics with light at the exact design wavelengths: signal {:.3} nm, idler {:.3} nm",
        spec.lambda_s * 1e9,
        spec.lambda_i * 1e9
    )];

    let report = DesignReport {
        crystal: spec.crystal.name.clone(),
        length,
        phasematching,
        pump: PumpReport {
            wavelength: spec.lambda_p,
            regime,
            waist: choice.waist,
            xi: choice.xi,
            angular_spread: choice.angular_spread,
        },
        signal,
        idler,
        predicted: Predicted {
            mu_signal: overlap.efficiencies.mu_signal,
            mu_idler: overlap.efficiencies.mu_idler,
            mu_symmetric: overlap.efficiencies.mu_symmetric,
            coincidence_probability: overlap.coincidence_probability,
            spectral_spatial_purity: purity,
        },
        lens_suggestions,
        warnings,
        notes,
        settings: config.clone(),
        plateau_reference_bandwidth: bandwidth,
    };
    Ok((
        report,
        DesignCurves {
            spectral_spatial: map,
            joint_angular: ja,
            collected_spectral_spatial: collected,
        },
    ))
}
