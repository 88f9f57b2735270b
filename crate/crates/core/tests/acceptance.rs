//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when the set of failing criteria differs from `KNOWN_RED`.
//!
//! Run alone with `cargo test -p pairsource-core --test acceptance`.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pairsource_core::designer::{design, design_with_curves, DesignConfig};
use pairsource_core::dispersion::{angle_from_waist, focusing_parameter, waist_from_angle, Catalog};
use pairsource_core::export;
use pairsource_core::heralding::single_arm_efficiency;
use pairsource_core::joint_amplitude::{
    intensity_correlation, joint_angular, joint_spectral, joint_spectral_collected, spectral_spatial_batch,
    CollectionMode, GridSpec, PartnerMode, Photon, PumpRegime, PumpSpec, SpatialFilter,
};
use pairsource_core::phasematching::{energy_match, InteractionSpec};
use pairsource_core::schmidt::{
    purity_vs_collection, purity_vs_pump_waist, schmidt_decompose, schmidt_decompose_complex,
    schmidt_decompose_intensity, schmidt_decompose_real, trace_purity, GridSource, IntensityPath,
    COLLECTION_SCAN_RATIO,
};
use pairsource_core::toy_model::{self, Grid1D};

/// Criteria expected to fail; the reasons are printed with the result.
const KNOWN_RED: &[u32] = &[5];

const PULSE: PumpRegime = PumpRegime::Pulsed { duration_fwhm: 8e-12 };

struct Report {
    id: u32,
    checks: Vec<(String, bool)>,
}

impl Report {
    fn new(id: u32) -> Self {
        Self { id, checks: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn within(&mut self, what: &str, value: f64, target: f64, tol: f64) {
        self.check(format!("{what} = {value:.6} (want {target} +/- {tol})"), (value - target).abs() <= tol);
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

fn knbo3() -> InteractionSpec {
    let cat = Catalog::builtin();
    InteractionSpec::catalog_default(cat.get("KNbO3").unwrap()).unwrap().solved().unwrap().0
}

fn ppktp() -> InteractionSpec {
    let cat = Catalog::builtin();
    InteractionSpec::catalog_default(cat.get("PPKTP").unwrap()).unwrap().solved().unwrap().0
}

/// Pulsed regime stored with a catalog entry.
fn catalog_regime(name: &str) -> PumpRegime {
    Catalog::builtin().get(name).unwrap().defaults.pump.as_ref().unwrap().regime
}

fn focusing_triple() -> Report {
    let mut r = Report::new(1);
    r.within("xi(532 nm, 10 mm, 200 um)", focusing_parameter(532e-9, 0.01, 200e-6).unwrap(), 0.021, 0.002);
    r.within("xi(810 nm, 10 mm, 145 um)", focusing_parameter(810e-9, 0.01, 145e-6).unwrap(), 0.061, 0.005);
    r.within("xi(1550 nm, 10 mm, 140 um)", focusing_parameter(1550e-9, 0.01, 140e-6).unwrap(), 0.126, 0.01);
    r
}

fn waist_formulas() -> Report {
    let mut r = Report::new(2);
    let ws = waist_from_angle(810e-9, 0.0035).unwrap();
    r.check(format!("waist(810 nm, 3.5 mrad) = {:.2} um in [140, 150]", ws * 1e6), (140e-6..=150e-6).contains(&ws));
    let wi = waist_from_angle(1550e-9, 0.007).unwrap();
    r.check(format!("waist(1550 nm, 7 mrad) = {:.2} um in [136, 146]", wi * 1e6), (136e-6..=146e-6).contains(&wi));
    r.within("angle(532 nm, 200 um) [rad]", angle_from_waist(532e-9, 200e-6).unwrap(), 0.0017, 0.0001);
    r
}

fn count_reductions() -> Report {
    let mut r = Report::new(3);
    let mu_1550 = single_arm_efficiency(7.0e3, 39.0e3, 0.0, 0.24, 0.87).unwrap();
    let mu_810 = single_arm_efficiency(0.9e3, 3.2e3, 0.0, 0.48, 0.78).unwrap();
    r.within("mu_1550", mu_1550, 0.860, 0.001);
    r.within("mu_810", mu_810, 0.751, 0.001);
    r.within("mu_si", (mu_1550 * mu_810).sqrt(), 0.803, 0.002);
    r
}

fn designer_end_to_end() -> Report {
    let mut r = Report::new(4);
    let spec = knbo3();
    let cfg = DesignConfig::default();
    let pulsed = design(&spec, PULSE, &cfg).unwrap();
    let cw = design(&spec, PumpRegime::Cw, &cfg).unwrap();
    let dts = pulsed.signal.angular_spread.to_degrees();
    r.within("pulsed signal acceptance [deg]", dts, 0.2, 0.05);
    r.within("pulsed idler/signal acceptance", pulsed.idler.angular_spread / pulsed.signal.angular_spread, 2.0, 0.3);
    r.within("pulsed signal waist / 145 um", pulsed.signal.waist / 145e-6, 1.0, 0.1);
    r.within("pulsed idler waist / 140 um", pulsed.idler.waist / 140e-6, 1.0, 0.1);
    r.within("cw/pulsed signal waist", cw.signal.waist / pulsed.signal.waist, 1.0, 0.05);
    r.within("cw/pulsed idler waist", cw.idler.waist / pulsed.idler.waist, 1.0, 0.05);
    r
}

/// Angle at which `purity` has fallen by `frac` of its total drop over the
/// scan, interpolated linearly between scan points.
fn knee(angles: &[f64], purity: &[f64], frac: f64) -> f64 {
    let level = purity[0] - frac * (purity[0] - purity[purity.len() - 1]);
    for k in 1..purity.len() {
        if purity[k] <= level {
            let t = (purity[k - 1] - level) / (purity[k - 1] - purity[k]);
            return angles[k - 1] + t * (angles[k] - angles[k - 1]);
        }
    }
    angles[angles.len() - 1]
}

fn purity_scans() -> Report {
    let mut r = Report::new(5);
    let spec = knbo3();
    let grid = GridSpec::default();
    let pump = PumpSpec::new(spec.lambda_p, PULSE, 200e-6).unwrap();

    let waists = [25e-6, 50e-6, 100e-6, 200e-6, 400e-6];
    let w = purity_vs_pump_waist(&spec, &pump, &waists, &grid).unwrap();
    let shown: Vec<String> = w.iter().map(|p| format!("{:.3}", p.purity)).collect();
    r.check(
        format!("purity over pump waists 25..400 um nonincreasing [{}]", shown.join(", ")),
        w.windows(2).all(|p| p[1].purity <= p[0].purity),
    );

    let design_pump = pump.with_waist(pairsource_core::designer::choose_pump_waist(spec.lambda_p, spec.length(), 0.02, None).unwrap().waist);
    let degrees = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0];
    let angles: Vec<f64> = degrees.iter().map(|d: &f64| d.to_radians()).collect();
    let scan = purity_vs_collection(&spec, &design_pump, &angles, COLLECTION_SCAN_RATIO, &grid, IntensityPath::SqrtIntensity)
        .unwrap();
    let p: Vec<f64> = scan.iter().map(|s| s.purity).collect();
    let at = |d: f64| p[degrees.iter().position(|x| *x == d).unwrap()];
    let drop = at(0.2) - at(1.0);
    r.check(format!("purity(0.2 deg) - purity(1.0 deg) = {drop:.4} > 0.1"), drop > 0.1);
    r.within("purity at 10 deg", at(10.0), 0.5, 0.1);
    r.within("knee (5% of total drop) [deg]", knee(&degrees, &p, 0.05), 0.3, 0.1);
    r
}

fn coupling_claims() -> Report {
    let mut r = Report::new(6);
    let cfg = DesignConfig::default();
    for (name, spec) in [("KNbO3", knbo3()), ("PPKTP", ppktp())] {
        let report = design(&spec, catalog_regime(name), &cfg).unwrap();
        r.check(format!("{name} mu_si = {:.4} >= 0.8", report.predicted.mu_symmetric), report.predicted.mu_symmetric >= 0.8);
        if name != "KNbO3" {
            continue;
        }
        r.check(
            format!("{name} collected spectral-spatial purity = {:.5} >= 0.95", report.predicted.spectral_spatial_purity),
            report.predicted.spectral_spatial_purity >= 0.95,
        );
        let pump = PumpSpec::new(spec.lambda_p, PULSE, report.pump.waist).unwrap();
        let ms = CollectionMode::new(spec.lambda_s, report.signal.angular_spread).unwrap();
        let mi = CollectionMode::new(spec.lambda_i, report.idler.angular_spread).unwrap();
        let grid = cfg.grid.clone().with_points(128);
        let before = joint_spectral(&spec, &pump, &grid).unwrap().intensity();
        let after = joint_spectral_collected(&spec, &pump, &grid, &ms, &mi).unwrap();
        let c = intensity_correlation(&before, &after).unwrap();
        r.check(format!("{name} joint spectral intensity correlation before/after collection = {c:.5} > 0.99"), c > 0.99);
    }
    r
}

fn toy_model_sweep() -> Report {
    let mut r = Report::new(7);
    let (mut worst_f, mut worst_w, mut worst_k) = (1.0f64, 0.0f64, 0.0f64);
    for sigma in [50e-6, 100e-6, 200e-6] {
        let grid = Grid1D::for_sigma(sigma).unwrap();
        for kps in [0.5, 2.0, 6.0] {
            let k_p = kps / sigma;
            let num = toy_model::herald_signal(k_p, sigma, &grid).unwrap();
            let closed = toy_model::heralded_closed_form(k_p, sigma, &grid).unwrap();
            worst_f = worst_f.min(toy_model::fidelity(&num, &closed).unwrap());
            worst_w = worst_w.max((num.moments().1 / sigma - 1.0).abs());
            worst_k = worst_k.max((num.phase_slope(-sigma, sigma).unwrap() / k_p - 1.0).abs());
        }
    }
    r.check(format!("min fidelity over 3x3 sweep = {worst_f:.12} >= 1 - 1e-6"), worst_f >= 1.0 - 1e-6);
    r.check(format!("max width error = {worst_w:.2e} < 1%"), worst_w < 0.01);
    r.check(format!("max phase slope error = {worst_k:.2e} < 1%"), worst_k < 0.01);
    r
}

fn schmidt_oracle() -> Report {
    let mut r = Report::new(8);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = DMatrix::from_fn(16, 16, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let svd = schmidt_decompose_complex(&m).unwrap().purity;
        worst = worst.max((svd - trace_purity(&m)).abs());
    }
    r.check(format!("SVD vs trace purity, 50 random 16x16: max diff {worst:.2e} < 1e-9"), worst < 1e-9);
    let f: Vec<f64> = (0..16).map(|i| (-(i as f64 - 7.5).powi(2) / 20.0).exp()).collect();
    let g: Vec<f64> = (0..16).map(|i| 1.0 + 0.3 * (i as f64).sin()).collect();
    let product = DMatrix::from_fn(16, 16, |i, j| f[i] * g[j]);
    let p = schmidt_decompose_real(&product, GridSource::Amplitude).unwrap().purity;
    r.check(format!("product grid purity = {p:.12}"), (p - 1.0).abs() < 1e-9);
    let mut worst_diag = 0.0f64;
    for n in [2usize, 7, 16, 64] {
        let d = schmidt_decompose_real(&DMatrix::identity(n, n), GridSource::Amplitude).unwrap().purity;
        worst_diag = worst_diag.max((d - 1.0 / n as f64).abs());
    }
    r.check(format!("uniform diagonal purity = 1/N, max diff {worst_diag:.2e}"), worst_diag < 1e-9);
    r
}

fn reported_purities(spec: &InteractionSpec, regime: PumpRegime, points: usize) -> Vec<(String, f64)> {
    let grid = GridSpec::default().with_points(points);
    let cfg = DesignConfig { grid: grid.clone(), ..DesignConfig::default() };
    let report = design(spec, regime, &cfg).unwrap();
    let pump = PumpSpec::new(spec.lambda_p, regime, report.pump.waist).unwrap();
    let mut out = vec![("design collected spectral-spatial".to_string(), report.predicted.spectral_spatial_purity)];
    out.push(("joint angular".into(), schmidt_decompose(&joint_angular(spec, &pump, &grid).unwrap()).unwrap().purity));
    if matches!(regime, PumpRegime::Pulsed { .. }) {
        out.push(("joint spectral".into(), schmidt_decompose(&joint_spectral(spec, &pump, &grid).unwrap()).unwrap().purity));
    }
    let maps = spectral_spatial_batch(spec, &pump, Photon::Signal, &grid, PartnerMode::Trace, &[SpatialFilter::default()]).unwrap();
    out.push((
        "signal spectral-spatial".into(),
        schmidt_decompose_intensity(&maps[0], IntensityPath::SqrtIntensity).unwrap().purity,
    ));
    out
}

fn solver_contracts() -> Report {
    let mut r = Report::new(9);
    let cat = Catalog::builtin();
    for c in cat.iter().filter(|c| c.pm_type.is_qpm()) {
        let (spec, sol) = InteractionSpec::catalog_default(c).unwrap().solved().unwrap();
        let dk = spec.collinear_mismatch().unwrap().abs();
        r.check(format!("{} |dk| = {dk:.2e} rad/m < 1e-6 (solver residual {:.2e})", c.name, sol.residual), dk < 1e-6);
    }
    let mut worst = 0.0f64;
    for (lp, ls) in [(532e-9, 810e-9), (780e-9, 1560e-9), (405e-9, 700e-9), (1064e-9, 1550e-9)] {
        let back = energy_match(lp, energy_match(lp, ls).unwrap()).unwrap();
        worst = worst.max((back / ls - 1.0).abs());
    }
    r.check(format!("energy_match involution, max rel err {worst:.1e} < 1e-12"), worst < 1e-12);
    let spec = knbo3();
    for regime in [PULSE, PumpRegime::Cw] {
        let a = reported_purities(&spec, regime, 256);
        let b = reported_purities(&spec, regime, 512);
        for ((name, x), (_, y)) in a.iter().zip(&b) {
            r.check(
                format!("{regime:?} {name} purity 256 -> 512: {x:.6} -> {y:.6} (|d| < 1e-3)"),
                (x - y).abs() < 1e-3,
            );
        }
    }
    r
}

fn determinism() -> Report {
    let mut r = Report::new(10);
    let spec = knbo3();
    for regime in [PULSE, PumpRegime::Cw] {
        let cfg = DesignConfig { grid: GridSpec::default().with_points(128), ..DesignConfig::default() };
        let dump = || {
            let (rep, curves) = design_with_curves(&spec, regime, &cfg).unwrap();
            let meta = export::Metadata::new();
            (
                serde_json::to_string_pretty(&rep).unwrap(),
                export::intensity_csv(&curves.spectral_spatial, &meta),
                export::amplitude_csv(&curves.joint_angular, &meta),
                export::intensity_json(&curves.collected_spectral_spatial, &meta).unwrap(),
            )
        };
        let (a, b) = (dump(), dump());
        r.check(format!("{regime:?} design JSON and CSV byte-identical across runs"), a == b);
    }
    r
}

fn main() {
    let suites: [(&str, fn() -> Report); 10] = [
        ("focusing parameters", focusing_triple),
        ("waist and angle conversions", waist_formulas),
        ("count-rate efficiencies", count_reductions),
        ("designer end to end", designer_end_to_end),
        ("purity scans", purity_scans),
        ("coupling", coupling_claims),
        ("toy model", toy_model_sweep),
        ("Schmidt oracle", schmidt_oracle),
        ("solver contracts and grid convergence", solver_contracts),
        ("determinism", determinism),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut red = Vec::new();
    for (id, (name, f)) in (1u32..).zip(suites) {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let rep = f();
        let tag = if rep.passed() { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name} ({:.1} s)", rep.id, t.elapsed().as_secs_f64());
        for (what, ok) in &rep.checks {
            println!("         {} {what}", if *ok { "ok " } else { "BAD" });
        }
        if !rep.passed() {
            red.push(rep.id);
        }
    }
    let expected: Vec<u32> = KNOWN_RED.iter().copied().filter(|c| filter.is_empty() || filter.contains(c)).collect();
    println!(
        "acceptance: {} red {:?}, known red {:?}",
        if red == expected { "as expected," } else { "UNEXPECTED," },
        red,
        expected
    );
    if red != expected {
        std::process::exit(1);
    }
}
