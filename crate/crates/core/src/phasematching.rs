//! Energy conservation, longitudinal phase mismatch with transverse
//! correction, the sinc phasematching amplitude, and solvers for the poling
//! period and the type-I tuning angle.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::dispersion::{refractive_index, CrystalSpec, PmType};
use crate::error::{require_positive, Result, SpdcError};
use crate::SPEED_OF_LIGHT;

/// Residual tolerance of the phasematching solvers (rad/m).
pub const SOLVER_TOLERANCE: f64 = 1e-6;
/// Iteration cap of the bisection solvers.
pub const SOLVER_MAX_ITER: usize = 200;

/// Polarization of one field: a principal axis, or the angle-dependent
/// effective index between two principal axes (type-I angle tuning).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    Axis(String),
    /// `n(theta) = [cos^2 theta / n_from^2 + sin^2 theta / n_to^2]^(-1/2)`.
    Tuned { from: String, to: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldPolarizations {
    pub pump: Polarization,
    pub signal: Polarization,
    pub idler: Polarization,
}

/// Wavelengths and polarizations of an interaction before it is bound to a
/// crystal. This is what catalog entries and config files carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionTemplate {
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub polarization: FieldPolarizations,
    /// Bisection bracket (rad) for angle-tuned interactions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuning_bracket: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GratingOrientation {
    /// Grating vector along +z: compensates `k_p - k_s - k_i > 0`.
    Forward,
    /// The opposite first-order Fourier component of the same grating.
    Reversed,
}

impl GratingOrientation {
    pub fn sign(self) -> f64 {
        match self {
            GratingOrientation::Forward => 1.0,
            GratingOrientation::Reversed => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grating {
    pub period: f64,
    pub orientation: GratingOrientation,
}

impl Grating {
    /// Signed grating wavevector subtracted from the mismatch.
    pub fn wavevector(&self) -> f64 {
        self.orientation.sign() * TAU / self.period
    }
}

/// Which of the three fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Pump,
    Signal,
    Idler,
}

/// Wavevector magnitudes of the three fields at one frequency triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavevectors {
    pub pump: f64,
    pub signal: f64,
    pub idler: f64,
}

/// A crystal together with the centre wavelengths and polarizations of the
/// three fields, plus whatever the solvers have fixed (grating or angle).
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSpec {
    pub crystal: CrystalSpec,
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub lambda_i: f64,
    pub polarization: FieldPolarizations,
    pub tuning_bracket: Option<[f64; 2]>,
    pub tuning_angle: Option<f64>,
    pub grating: Option<Grating>,
}

/// Outcome of a phasematching solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMatch {
    Poling { period: f64, orientation: GratingOrientation },
    Angle { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatchSolution {
    pub solution: PhaseMatch,
    /// |Delta k_z| at the centre wavelengths after the solve (rad/m).
    pub residual: f64,
}

/// Idler wavelength from energy conservation, `1/l_i = 1/l_p - 1/l_s`.
pub fn energy_match(lambda_p: f64, lambda_s: f64) -> Result<f64> {
    require_positive("pump wavelength", lambda_p)?;
    require_positive("signal wavelength", lambda_s)?;
    if lambda_s <= lambda_p {
        return Err(SpdcError::domain(format!(
            "signal wavelength {lambda_s:e} m must exceed the pump wavelength {lambda_p:e} m"
        )));
    }
    Ok(lambda_p * lambda_s / (lambda_s - lambda_p))
}

/// Unnormalized phasematching amplitude `sinc(dk L / 2)`, with `sinc(0) = 1`.
pub fn pm_amplitude(delta_k: f64, length: f64) -> f64 {
    sinc(0.5 * delta_k * length)
}

#[inline]
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Longitudinal mismatch for given wavevector magnitudes and transverse
/// components. The pump transverse component is `q_s + q_i`.
#[inline]
pub(crate) fn kz_mismatch_unchecked(k: &Wavevectors, q_s: f64, q_i: f64, grating_k: f64) -> f64 {
    let q_p = q_s + q_i;
    (k.pump * k.pump - q_p * q_p).sqrt()
        - (k.signal * k.signal - q_s * q_s).sqrt()
        - (k.idler * k.idler - q_i * q_i).sqrt()
        - grating_k
}

impl InteractionSpec {
    /// Bind a crystal to centre wavelengths; the idler follows from energy
    /// conservation. The signal must be the shorter of the pair.
    pub fn new(crystal: CrystalSpec, lambda_p: f64, lambda_s: f64, polarization: FieldPolarizations) -> Result<Self> {
        let lambda_i = energy_match(lambda_p, lambda_s)?;
        if lambda_s > lambda_i * (1.0 + 1e-12) {
            return Err(SpdcError::domain(format!(
                "signal {lambda_s:e} m is longer than idler {lambda_i:e} m; swap the labels"
            )));
        }
        let grating = crystal.poling_period().map(|period| Grating {
            period,
            orientation: GratingOrientation::Forward,
        });
        let spec = InteractionSpec {
            crystal,
            lambda_p,
            lambda_s,
            lambda_i,
            polarization,
            tuning_bracket: None,
            tuning_angle: None,
            grating,
        };
        spec.check_polarizations()?;
        Ok(spec)
    }

    pub fn from_template(crystal: CrystalSpec, template: &InteractionTemplate) -> Result<Self> {
        let mut spec = Self::new(crystal, template.lambda_p, template.lambda_s, template.polarization.clone())?;
        spec.tuning_bracket = template.tuning_bracket;
        Ok(spec)
    }

    /// The interaction stored as the crystal's catalog default.
    pub fn catalog_default(crystal: &CrystalSpec) -> Result<Self> {
        let template = crystal.defaults.interaction.as_ref().ok_or_else(|| {
            SpdcError::domain(format!("crystal {} has no default interaction", crystal.name))
        })?;
        Self::from_template(crystal.clone(), template)
    }

    fn check_polarizations(&self) -> Result<()> {
        let axes: Vec<&str> = self.crystal.axes().collect();
        let known = |a: &str| -> Result<()> {
            if axes.contains(&a) {
                Ok(())
            } else {
                Err(SpdcError::domain(format!("crystal {} has no axis `{a}`", self.crystal.name)))
            }
        };
        for p in [&self.polarization.pump, &self.polarization.signal, &self.polarization.idler] {
            match p {
                Polarization::Axis(a) => known(a)?,
                Polarization::Tuned { from, to } => {
                    known(from)?;
                    known(to)?;
                }
            }
        }
        let tuned = [&self.polarization.pump, &self.polarization.signal, &self.polarization.idler]
            .iter()
            .filter(|p| matches!(p, Polarization::Tuned { .. }))
            .count();
        match self.crystal.pm_type {
            PmType::Type1Angle if tuned == 0 => Err(SpdcError::domain(
                "type-I angle phasematching needs one tuned polarization",
            )),
            PmType::Type1Angle => {
                if self.polarization.signal != self.polarization.idler {
                    return Err(SpdcError::domain("type-I requires equal signal and idler polarizations"));
                }
                Ok(())
            }
            PmType::Type0Qpm | PmType::Type2Qpm if tuned > 0 => {
                Err(SpdcError::domain("quasi-phasematched interactions use principal axes only"))
            }
            PmType::Type0Qpm => {
                let p = &self.polarization;
                if p.pump != p.signal || p.signal != p.idler {
                    return Err(SpdcError::domain("type-0 requires one polarization for all fields"));
                }
                Ok(())
            }
            PmType::Type2Qpm => {
                if self.polarization.signal == self.polarization.idler {
                    return Err(SpdcError::domain("type-II requires orthogonal signal and idler"));
                }
                Ok(())
            }
        }
    }

    pub fn length(&self) -> f64 {
        self.crystal.length()
    }

    fn polarization_of(&self, field: Field) -> &Polarization {
        match field {
            Field::Pump => &self.polarization.pump,
            Field::Signal => &self.polarization.signal,
            Field::Idler => &self.polarization.idler,
        }
    }

    fn index_with_angle(&self, field: Field, wavelength: f64, angle: Option<f64>) -> Result<f64> {
        match self.polarization_of(field) {
            Polarization::Axis(axis) => refractive_index(&self.crystal, axis, wavelength),
            Polarization::Tuned { from, to } => {
                let theta = angle.ok_or_else(|| {
                    SpdcError::domain("tuning angle not set; run the angle solver first")
                })?;
                let na = refractive_index(&self.crystal, from, wavelength)?;
                let nb = refractive_index(&self.crystal, to, wavelength)?;
                let (s, c) = theta.sin_cos();
                Ok((c * c / (na * na) + s * s / (nb * nb)).powf(-0.5))
            }
        }
    }

    /// Refractive index seen by `field` at `wavelength`.
    pub fn index(&self, field: Field, wavelength: f64) -> Result<f64> {
        self.index_with_angle(field, wavelength, self.tuning_angle)
    }

    /// Signed grating wavevector, zero for birefringent phasematching.
    pub fn grating_wavevector(&self) -> f64 {
        if self.crystal.pm_type.is_qpm() {
            self.grating.map_or(0.0, |g| g.wavevector())
        } else {
            0.0
        }
    }

    /// Wavelengths of the three fields for frequency detunings (Hz) of signal
    /// and idler from their centres. The pump carries the sum.
    pub fn detuned_wavelengths(&self, nu_s: f64, nu_i: f64) -> (f64, f64, f64) {
        let c = SPEED_OF_LIGHT;
        let fs = c / self.lambda_s + nu_s;
        let fi = c / self.lambda_i + nu_i;
        (c / (fs + fi), c / fs, c / fi)
    }

    fn wavevectors_with_angle(&self, nu_s: f64, nu_i: f64, angle: Option<f64>) -> Result<Wavevectors> {
        let (lp, ls, li) = self.detuned_wavelengths(nu_s, nu_i);
        if !(lp > 0.0 && ls > 0.0 && li > 0.0) {
            return Err(SpdcError::domain("detuning drives a frequency through zero"));
        }
        Ok(Wavevectors {
            pump: TAU * self.index_with_angle(Field::Pump, lp, angle)? / lp,
            signal: TAU * self.index_with_angle(Field::Signal, ls, angle)? / ls,
            idler: TAU * self.index_with_angle(Field::Idler, li, angle)? / li,
        })
    }

    /// Wavevector magnitudes at the given detunings.
    pub fn wavevectors(&self, nu_s: f64, nu_i: f64) -> Result<Wavevectors> {
        self.wavevectors_with_angle(nu_s, nu_i, self.tuning_angle)
    }

    /// Collinear mismatch at the centre wavelengths (grating included).
    pub fn collinear_mismatch(&self) -> Result<f64> {
        delta_k_longitudinal(self, 0.0, 0.0, 0.0, 0.0)
    }

    /// Fix whatever the phasematching type needs (grating or angle).
    pub fn solve(&mut self) -> Result<PhaseMatchSolution> {
        match self.crystal.pm_type {
            PmType::Type1Angle => {
                let bracket = self.tuning_bracket.unwrap_or([0.0, std::f64::consts::FRAC_PI_2]);
                let sol = solve_pm_angle(self, bracket)?;
                if let PhaseMatch::Angle { theta } = sol.solution {
                    self.tuning_angle = Some(theta);
                }
                Ok(sol)
            }
            PmType::Type0Qpm | PmType::Type2Qpm => {
                let sol = solve_poling_period(self)?;
                if let PhaseMatch::Poling { period, orientation } = sol.solution {
                    self.grating = Some(Grating { period, orientation });
                }
                Ok(sol)
            }
        }
    }

    /// Clone of `self` with the phasematching solved.
    pub fn solved(&self) -> Result<(Self, PhaseMatchSolution)> {
        let mut s = self.clone();
        let sol = s.solve()?;
        Ok((s, sol))
    }
}

/// Longitudinal phase mismatch
/// `dk_z = k_pz - k_sz - k_iz - K_G` with `k_z = sqrt(k^2 - q^2)` and
/// `q_p = q_s + q_i`. Detunings in Hz, transverse wavevectors in rad/m.
pub fn delta_k_longitudinal(spec: &InteractionSpec, nu_s: f64, nu_i: f64, q_s: f64, q_i: f64) -> Result<f64> {
    let k = spec.wavevectors(nu_s, nu_i)?;
    let q_p = q_s + q_i;
    for (field, q, kk) in [("pump", q_p, k.pump), ("signal", q_s, k.signal), ("idler", q_i, k.idler)] {
        if q.abs() >= kk {
            return Err(SpdcError::Evanescent { field, q, k: kk });
        }
    }
    Ok(kz_mismatch_unchecked(&k, q_s, q_i, spec.grating_wavevector()))
}

/// First-order poling period for collinear quasi-phasematching at the centre
/// wavelengths. A negative material mismatch is served by the reversed
/// Fourier component of the grating and reported as such.
pub fn solve_poling_period(spec: &InteractionSpec) -> Result<PhaseMatchSolution> {
    if !spec.crystal.pm_type.is_qpm() {
        return Err(SpdcError::domain(format!(
            "crystal {} is not quasi-phasematched",
            spec.crystal.name
        )));
    }
    let k = spec.wavevectors(0.0, 0.0)?;
    let mismatch = k.pump - k.signal - k.idler;
    if !mismatch.is_finite() {
        return Err(SpdcError::Convergence(format!("non-finite material mismatch {mismatch}")));
    }
    if mismatch.abs() < SOLVER_TOLERANCE {
        return Err(SpdcError::NoGratingNeeded { mismatch });
    }
    let orientation = if mismatch > 0.0 {
        GratingOrientation::Forward
    } else {
        GratingOrientation::Reversed
    };
    let grating = Grating {
        period: TAU / mismatch.abs(),
        orientation,
    };
    let residual = (mismatch - grating.wavevector()).abs();
    if residual >= SOLVER_TOLERANCE {
        return Err(SpdcError::Convergence(format!("poling residual {residual:e} rad/m")));
    }
    Ok(PhaseMatchSolution {
        solution: PhaseMatch::Poling {
            period: grating.period,
            orientation,
        },
        residual,
    })
}

/// Bisection for the tuning angle of a type-I interaction within `bracket`
/// (radians), on the collinear mismatch at the centre wavelengths.
pub fn solve_pm_angle(spec: &InteractionSpec, bracket: [f64; 2]) -> Result<PhaseMatchSolution> {
    if spec.crystal.pm_type != PmType::Type1Angle {
        return Err(SpdcError::domain(format!(
            "crystal {} is not angle phasematched",
            spec.crystal.name
        )));
    }
    let f = |theta: f64| -> Result<f64> {
        let k = spec.wavevectors_with_angle(0.0, 0.0, Some(theta))?;
        Ok(k.pump - k.signal - k.idler)
    };
    let [mut lo, mut hi] = bracket;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(SpdcError::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(angle_solution(lo, 0.0));
    }
    if f_hi == 0.0 {
        return Ok(angle_solution(hi, 0.0));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(SpdcError::Convergence(format!(
            "no sign change in bracket: dk({lo}) = {f_lo:e}, dk({hi}) = {f_hi:e} rad/m"
        )));
    }
    for _ in 0..SOLVER_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() < SOLVER_TOLERANCE {
            return Ok(angle_solution(mid, f_mid.abs()));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(SpdcError::Convergence(format!(
        "angle bisection did not reach {SOLVER_TOLERANCE:e} rad/m in {SOLVER_MAX_ITER} iterations"
    )))
}

fn angle_solution(theta: f64, residual: f64) -> PhaseMatchSolution {
    PhaseMatchSolution {
        solution: PhaseMatch::Angle { theta },
        residual,
    }
}
