use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::collection::CollectionMode;
use super::grid::{Axis, GridSpec, IntensityGrid, JointAmplitude, Variable};
use super::pump::{pump_angular_envelope, pump_spectral_amplitude, pump_spectral_envelope, PumpSpec};
use crate::error::{Result, SpdcError};
use crate::par::{map_indexed, pairwise_sum};
use crate::phasematching::{kz_mismatch_unchecked, sinc, InteractionSpec, Wavevectors};
use crate::SPEED_OF_LIGHT;

/// Phase `|dk| L / 2` taken as the edge of the phasematching envelope when
/// sizing windows (`sinc^2(2) ~ 0.21`, close to the 1/e^2 point).
const EDGE_PHASE: f64 = 2.0;

/// Pump angular envelope is dropped beyond this many `1/w_p` in `q_s + q_i`
/// (relative intensity `exp(-72)`).
const BAND_WIDTHS: f64 = 12.0;

/// Half widths (1/e^2 estimates times the grid's window scale) of the
/// frequency detuning window and of the transverse wavevector window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Windows {
    /// Hz, applied to both signal and idler detunings.
    pub spectral: f64,
    /// rad/m, applied to both transverse wavevectors.
    pub transverse: f64,
}

/// Which photon a spectral-spatial map describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Photon {
    Signal,
    Idler,
}

impl Photon {
    pub fn partner(self) -> Photon {
        match self {
            Photon::Signal => Photon::Idler,
            Photon::Idler => Photon::Signal,
        }
    }

    pub fn wavelength_variable(self) -> Variable {
        match self {
            Photon::Signal => Variable::WavelengthSignal,
            Photon::Idler => Variable::WavelengthIdler,
        }
    }

    pub fn angle_variable(self) -> Variable {
        match self {
            Photon::Signal => Variable::AngleSignalExternal,
            Photon::Idler => Variable::AngleIdlerExternal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Photon::Signal => "signal",
            Photon::Idler => "idler",
        }
    }
}

/// How the partner photon's angle enters a spectral-spatial map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartnerMode {
    /// Sum the partner angle over the grid (reduced intensity).
    #[default]
    Trace,
    /// Fix the partner on the anticorrelated ridge `q_partner = -q`.
    RidgeSlice,
}

fn centre_frequencies(spec: &InteractionSpec) -> (f64, f64) {
    (SPEED_OF_LIGHT / spec.lambda_s, SPEED_OF_LIGHT / spec.lambda_i)
}

/// Expand then bisect for the smallest `x > 0` where `g(x) >= target`,
/// capped at `cap`. Evaluation errors (leaving the transparency window)
/// end the expansion at the last good point.
fn edge_search(g: impl Fn(f64) -> Result<f64>, start: f64, cap: f64, target: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = start;
    loop {
        match g(hi) {
            Ok(v) if v >= target => break,
            Ok(_) if hi >= cap => return cap,
            Ok(_) => {
                lo = hi;
                hi = (2.0 * hi).min(cap);
            }
            Err(_) => return lo.max(start),
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        match g(mid) {
            Ok(v) if v < target => lo = mid,
            _ => hi = mid,
        }
    }
    hi
}

/// Default windows: `window_scale` times the larger of the phasematching
/// edge and the pump-imposed width, for each variable.
pub fn estimate_windows(spec: &InteractionSpec, pump: &PumpSpec, grid: &GridSpec) -> Result<Windows> {
    grid.validate()?;
    let length = spec.length();
    let gk = spec.grating_wavevector();
    let k0 = spec.wavevectors(0.0, 0.0)?;
    let (fs0, fi0) = centre_frequencies(spec);

    let spectral = match grid.spectral_half_window {
        Some(w) => w,
        None => {
            let phase = |nu: f64| -> Result<f64> {
                let a = spec.wavevectors(nu, -nu)?;
                let b = spec.wavevectors(-nu, nu)?;
                let pa = kz_mismatch_unchecked(&a, 0.0, 0.0, gk).abs();
                let pb = kz_mismatch_unchecked(&b, 0.0, 0.0, gk).abs();
                Ok(0.5 * length * pa.max(pb))
            };
            let cap = 0.2 * fs0.min(fi0);
            let nu_pm = edge_search(phase, 1e9, cap, EDGE_PHASE);
            let mapped = match pump.spectral_fwhm() {
                None => 0.0,
                Some(fwhm) => {
                    // Intensity 1/e^2 half width of the pump, carried to the
                    // signal and idler through the collinear ridge slope.
                    let nu_pe = fwhm * (0.5 / LN_2).sqrt();
                    let h = 1e-4 * fs0.min(fi0);
                    let d = |ns: f64, ni: f64| -> Result<f64> {
                        Ok(kz_mismatch_unchecked(&spec.wavevectors(ns, ni)?, 0.0, 0.0, gk))
                    };
                    let a = (d(h, 0.0)? - d(-h, 0.0)?) / (2.0 * h);
                    let b = (d(0.0, h)? - d(0.0, -h)?) / (2.0 * h);
                    let denom = (a - b).abs();
                    let ratio = if denom > 0.0 { a.abs().max(b.abs()) / denom } else { f64::INFINITY };
                    (nu_pe * ratio).min(10.0 * nu_pm.max(nu_pe))
                }
            };
            grid.window_scale * (nu_pm * nu_pm + mapped * mapped).sqrt()
        }
    };

    let transverse = match grid.angular_half_window {
        Some(theta) => (TAU / spec.lambda_s) * theta.sin(),
        None => {
            let phase = |q: f64| -> Result<f64> {
                Ok(0.5 * length * kz_mismatch_unchecked(&k0, q, -q, gk).abs())
            };
            let cap = 0.2 * (TAU / spec.lambda_s).min(TAU / spec.lambda_i);
            let q_pm = edge_search(phase, 1e3, cap, EDGE_PHASE);
            grid.window_scale * q_pm.max(2.0 / pump.waist)
        }
    };
    Ok(Windows { spectral, transverse })
}

/// Wavelength axes for signal and idler covering `+-half` Hz of detuning.
fn spectral_axes(spec: &InteractionSpec, half: f64, n: usize) -> Result<(Axis, Axis)> {
    let (fs0, fi0) = centre_frequencies(spec);
    if half >= fs0.min(fi0) {
        return Err(SpdcError::domain("spectral window reaches zero frequency"));
    }
    let c = SPEED_OF_LIGHT;
    let s = Axis::uniform(Variable::WavelengthSignal, c / (fs0 + half), c / (fs0 - half), n)?;
    let i = Axis::uniform(Variable::WavelengthIdler, c / (fi0 + half), c / (fi0 - half), n)?;
    // Fails with the crystal's transparency error if the window leaves it.
    spec.wavevectors(half, half)?;
    spec.wavevectors(-half, -half)?;
    spec.wavevectors(half, -half)?;
    spec.wavevectors(-half, half)?;
    Ok((s, i))
}

/// External angle axes for signal and idler covering `+-q_max` of
/// transverse wavevector, `q = (2 pi / lambda) sin(theta)`.
fn angle_axes(spec: &InteractionSpec, q_max: f64, n: usize) -> Result<(Axis, Axis)> {
    let k0 = spec.wavevectors(0.0, 0.0)?;
    let kv_s = TAU / spec.lambda_s;
    let kv_i = TAU / spec.lambda_i;
    if q_max >= kv_s || q_max >= kv_i {
        return Err(SpdcError::domain(format!(
            "angular window implies |q| = {q_max:e} rad/m beyond the vacuum wavevector"
        )));
    }
    if 2.0 * q_max >= k0.pump.min(k0.signal).min(k0.idler) {
        return Err(SpdcError::domain(format!(
            "angular window implies evanescent fields (|q| = {q_max:e} rad/m)"
        )));
    }
    let s = Axis::symmetric(Variable::AngleSignalExternal, (q_max / kv_s).asin(), n)?;
    let i = Axis::symmetric(Variable::AngleIdlerExternal, (q_max / kv_i).asin(), n)?;
    Ok((s, i))
}

fn detuning(lambda: f64, centre_freq: f64) -> f64 {
    SPEED_OF_LIGHT / lambda - centre_freq
}

/// Joint spectral amplitude over `(lambda_s, lambda_i)` at `q = 0`.
pub fn joint_spectral(spec: &InteractionSpec, pump: &PumpSpec, grid: &GridSpec) -> Result<JointAmplitude> {
    let w = estimate_windows(spec, pump, grid)?;
    let (ax_s, ax_i) = spectral_axes(spec, w.spectral, grid.points)?;
    let (fs0, fi0) = centre_frequencies(spec);
    let (length, gk) = (spec.length(), spec.grating_wavevector());
    let n = grid.points;
    let cw = pump.spectral_fwhm().is_none();

    let rows: Vec<Result<Vec<Complex64>>> = map_indexed(n, |ix| {
        let nu_s = detuning(ax_s.samples[ix], fs0);
        let mut row = vec![Complex64::default(); n];
        if cw {
            if let Some(iy) = ax_i.nearest(SPEED_OF_LIGHT / (fi0 - nu_s)) {
                let k = spec.wavevectors(nu_s, -nu_s)?;
                row[iy] = Complex64::new(sinc(0.5 * length * kz_mismatch_unchecked(&k, 0.0, 0.0, gk)), 0.0);
            }
        } else {
            for (iy, v) in row.iter_mut().enumerate() {
                let nu_i = detuning(ax_i.samples[iy], fi0);
                let k = spec.wavevectors(nu_s, nu_i)?;
                let a = pump_spectral_amplitude(pump, nu_s + nu_i)
                    * sinc(0.5 * length * kz_mismatch_unchecked(&k, 0.0, 0.0, gk));
                *v = Complex64::new(a, 0.0);
            }
        }
        Ok(row)
    });
    let mut values = Vec::with_capacity(n * n);
    for r in rows {
        values.extend(r?);
    }
    JointAmplitude::new(ax_s, ax_i, values)
}

/// Joint angular amplitude over external `(theta_s, theta_i)` at the centre
/// wavelengths.
pub fn joint_angular(spec: &InteractionSpec, pump: &PumpSpec, grid: &GridSpec) -> Result<JointAmplitude> {
    let w = estimate_windows(spec, pump, grid)?;
    let (ax_s, ax_i) = angle_axes(spec, w.transverse, grid.points)?;
    let k = spec.wavevectors(0.0, 0.0)?;
    let (length, gk) = (spec.length(), spec.grating_wavevector());
    let q_s: Vec<f64> = ax_s.samples.iter().map(|t| TAU / spec.lambda_s * t.sin()).collect();
    let q_i: Vec<f64> = ax_i.samples.iter().map(|t| TAU / spec.lambda_i * t.sin()).collect();
    let n = grid.points;
    let rows = map_indexed(n, |ix| {
        q_i.iter()
            .map(|&qi| {
                let qs = q_s[ix];
                let a = pump_angular_envelope(pump, qs + qi)
                    * sinc(0.5 * length * kz_mismatch_unchecked(&k, qs, qi, gk));
                Complex64::new(a, 0.0)
            })
            .collect::<Vec<_>>()
    });
    JointAmplitude::new(ax_s, ax_i, rows.concat())
}

/// Pump spectral samples `(detuning, intensity weight)` spanning +-3 standard
/// deviations of the pump intensity spectrum; a single sample for CW.
pub fn pump_samples(pump: &PumpSpec, n: usize) -> Vec<(f64, f64)> {
    match pump.spectral_fwhm() {
        None => vec![(0.0, 1.0)],
        Some(_) if n <= 1 => vec![(0.0, 1.0)],
        Some(fwhm) => {
            let sigma = fwhm / (2.0 * (2.0 * LN_2).sqrt());
            let m = (n - 1) as f64;
            let nus: Vec<f64> = (0..n).map(|i| 3.0 * sigma * (2.0 * i as f64 - m) / m).collect();
            let w: Vec<f64> = nus.iter().map(|&nu| pump_spectral_envelope(pump, nu)).collect();
            let total = pairwise_sum(&w);
            nus.into_iter().zip(w).map(|(nu, w)| (nu, w / total)).collect()
        }
    }
}

/// Collection filters applied to a spectral-spatial map: `own` acts on the
/// mapped photon's angle, `partner` on the traced-out angle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialFilter {
    pub own: Option<CollectionMode>,
    pub partner: Option<CollectionMode>,
}

/// Reduced spectral-spatial intensity of one photon over `(lambda, theta)`.
pub fn spectral_spatial(
    spec: &InteractionSpec,
    pump: &PumpSpec,
    photon: Photon,
    grid: &GridSpec,
    mode: PartnerMode,
) -> Result<IntensityGrid> {
    let mut out = spectral_spatial_batch(spec, pump, photon, grid, mode, &[SpatialFilter::default()])?;
    Ok(out.remove(0))
}

/// Several filtered spectral-spatial maps from one pass over the amplitude.
pub fn spectral_spatial_batch(
    spec: &InteractionSpec,
    pump: &PumpSpec,
    photon: Photon,
    grid: &GridSpec,
    mode: PartnerMode,
    filters: &[SpatialFilter],
) -> Result<Vec<IntensityGrid>> {
    if filters.is_empty() {
        return Err(SpdcError::domain("no spectral-spatial filters requested"));
    }
    let w = estimate_windows(spec, pump, grid)?;
    let (ax_ls, ax_li) = spectral_axes(spec, w.spectral, grid.points)?;
    let (ax_ts, ax_ti) = angle_axes(spec, w.transverse, grid.points)?;
    let (fs0, fi0) = centre_frequencies(spec);
    let (ax_l, ax_t, ax_tp, f_own, f_partner, lambda_partner0) = match photon {
        Photon::Signal => (ax_ls, ax_ts, ax_ti, fs0, fi0, spec.lambda_i),
        Photon::Idler => (ax_li, ax_ti, ax_ts, fi0, fs0, spec.lambda_s),
    };
    let (length, gk) = (spec.length(), spec.grating_wavevector());
    let n = grid.points;
    let samples = pump_samples(pump, grid.pump_samples);

    // Partner acceptance weights |u|^2 per filter; trace uses all ones.
    let partner_w: Vec<Vec<f64>> = filters
        .iter()
        .map(|f| match &f.partner {
            None => Ok(vec![1.0; n]),
            Some(m) => {
                m.check_axis(&ax_tp)?;
                Ok(ax_tp.samples.iter().map(|&t| m.profile(t).powi(2)).collect())
            }
        })
        .collect::<Result<_>>()?;
    let own_w: Vec<Vec<f64>> = filters
        .iter()
        .map(|f| match &f.own {
            None => Ok(vec![1.0; n]),
            Some(m) => {
                m.check_axis(&ax_t)?;
                Ok(ax_t.samples.iter().map(|&t| m.profile(t).powi(2)).collect())
            }
        })
        .collect::<Result<_>>()?;

    let sin_t: Vec<f64> = ax_t.samples.iter().map(|t| t.sin()).collect();
    let sin_tp: Vec<f64> = ax_tp.samples.iter().map(|t| t.sin()).collect();
    // Partner index band per column, from the centre partner wavelength and
    // a margin of two grid steps for the detuned wavelengths.
    let kv_p0 = TAU / lambda_partner0;
    let kv_own0 = TAU * f_own / SPEED_OF_LIGHT;
    let step_q = kv_p0 * (ax_tp.step());
    let q_band = BAND_WIDTHS / pump.waist + 2.0 * step_q;
    let bands: Vec<(usize, usize)> = (0..n)
        .map(|c| {
            let centre = -kv_own0 * sin_t[c];
            let lo = sin_tp.partition_point(|&s| kv_p0 * s < centre - q_band);
            let hi = sin_tp.partition_point(|&s| kv_p0 * s <= centre + q_band);
            (lo, hi)
        })
        .collect();

    let nf = filters.len();
    let rows: Vec<Result<Vec<f64>>> = map_indexed(n, |ix| {
        let lambda_x = ax_l.samples[ix];
        let nu_x = detuning(lambda_x, f_own);
        let kv_x = TAU / lambda_x;
        // acc[f * n + c]
        let mut acc = vec![0.0; nf * n];
        for &(nu_p, weight) in &samples {
            let nu_partner = nu_p - nu_x;
            let (nu_s, nu_i) = match photon {
                Photon::Signal => (nu_x, nu_partner),
                Photon::Idler => (nu_partner, nu_x),
            };
            let k: Wavevectors = spec.wavevectors(nu_s, nu_i)?;
            let kv_p = TAU * (f_partner + nu_partner) / SPEED_OF_LIGHT;
            for c in 0..n {
                let q_x = kv_x * sin_t[c];
                match mode {
                    PartnerMode::RidgeSlice => {
                        let (qs, qi) = ordered(photon, q_x, -q_x);
                        let a = sinc(0.5 * length * kz_mismatch_unchecked(&k, qs, qi, gk));
                        let a2 = weight * a * a;
                        for f in 0..nf {
                            acc[f * n + c] += a2;
                        }
                    }
                    PartnerMode::Trace => {
                        let (lo, hi) = bands[c];
                        for j in lo..hi {
                            let q_p = kv_p * sin_tp[j];
                            let (qs, qi) = ordered(photon, q_x, q_p);
                            let a = pump_angular_envelope(pump, q_x + q_p)
                                * sinc(0.5 * length * kz_mismatch_unchecked(&k, qs, qi, gk));
                            let a2 = weight * a * a;
                            for f in 0..nf {
                                acc[f * n + c] += a2 * partner_w[f][j];
                            }
                        }
                    }
                }
            }
        }
        Ok(acc)
    });

    let mut per_filter = vec![Vec::with_capacity(n * n); nf];
    for r in rows {
        let acc = r?;
        for f in 0..nf {
            per_filter[f].extend((0..n).map(|c| acc[f * n + c] * own_w[f][c]));
        }
    }
    per_filter
        .into_iter()
        .map(|v| IntensityGrid::new(ax_l.clone(), ax_t.clone(), v))
        .collect()
}

#[inline]
fn ordered(photon: Photon, own: f64, partner: f64) -> (f64, f64) {
    match photon {
        Photon::Signal => (own, partner),
        Photon::Idler => (partner, own),
    }
}

/// Joint spectral intensity after both photons pass Gaussian angular
/// collection, summed over the collected emission angles.
pub fn joint_spectral_collected(
    spec: &InteractionSpec,
    pump: &PumpSpec,
    grid: &GridSpec,
    mode_s: &CollectionMode,
    mode_i: &CollectionMode,
) -> Result<IntensityGrid> {
    let w = estimate_windows(spec, pump, grid)?;
    let (ax_s, ax_i) = spectral_axes(spec, w.spectral, grid.points)?;
    let (ax_ts, ax_ti) = angle_axes(spec, w.transverse, grid.points)?;
    mode_s.check_axis(&ax_ts)?;
    mode_i.check_axis(&ax_ti)?;
    let (fs0, fi0) = centre_frequencies(spec);
    let (length, gk) = (spec.length(), spec.grating_wavevector());
    let n = grid.points;
    let cw = pump.spectral_fwhm().is_none();

    // Keep only angles where the acceptance intensity exceeds 1e-12.
    let support = |axis: &Axis, m: &CollectionMode| -> Vec<(f64, f64)> {
        axis.samples
            .iter()
            .map(|&t| (t.sin(), m.profile(t).powi(2)))
            .filter(|&(_, u2)| u2 > 1e-12)
            .collect()
    };
    let sup_s = support(&ax_ts, mode_s);
    let sup_i = support(&ax_ti, mode_i);
    let q_band = BAND_WIDTHS / pump.waist;

    let cell = |nu_s: f64, nu_i: f64| -> Result<f64> {
        let k = spec.wavevectors(nu_s, nu_i)?;
        let kv_s = TAU * (fs0 + nu_s) / SPEED_OF_LIGHT;
        let kv_i = TAU * (fi0 + nu_i) / SPEED_OF_LIGHT;
        let mut terms = Vec::with_capacity(sup_s.len());
        for &(ss, us) in &sup_s {
            let qs = kv_s * ss;
            let mut t = 0.0;
            for &(si, ui) in &sup_i {
                let qi = kv_i * si;
                if (qs + qi).abs() > q_band {
                    continue;
                }
                let a = pump_angular_envelope(pump, qs + qi)
                    * sinc(0.5 * length * kz_mismatch_unchecked(&k, qs, qi, gk));
                t += ui * a * a;
            }
            terms.push(us * t);
        }
        Ok(pairwise_sum(&terms))
    };

    let rows: Vec<Result<Vec<f64>>> = map_indexed(n, |ix| {
        let nu_s = detuning(ax_s.samples[ix], fs0);
        let mut row = vec![0.0; n];
        if cw {
            if let Some(iy) = ax_i.nearest(SPEED_OF_LIGHT / (fi0 - nu_s)) {
                row[iy] = cell(nu_s, -nu_s)?;
            }
        } else {
            for (iy, v) in row.iter_mut().enumerate() {
                let nu_i = detuning(ax_i.samples[iy], fi0);
                let p = pump_spectral_envelope(pump, nu_s + nu_i);
                if p > 1e-16 {
                    *v = p * cell(nu_s, nu_i)?;
                }
            }
        }
        Ok(row)
    });
    let mut values = Vec::with_capacity(n * n);
    for r in rows {
        values.extend(r?);
    }
    IntensityGrid::new(ax_s, ax_i, values)
}

/// Normalized overlap `sum(a b) / sqrt(sum(a^2) sum(b^2))` of two intensity
/// maps on the same grid.
pub fn intensity_correlation(a: &IntensityGrid, b: &IntensityGrid) -> Result<f64> {
    if a.axis_x != b.axis_x || a.axis_y != b.axis_y {
        return Err(SpdcError::domain("intensity maps live on different grids"));
    }
    let ab: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
    let aa: Vec<f64> = a.values.iter().map(|x| x * x).collect();
    let bb: Vec<f64> = b.values.iter().map(|x| x * x).collect();
    Ok(pairwise_sum(&ab) / (pairwise_sum(&aa) * pairwise_sum(&bb)).sqrt())
}
