//! `pairsource`: batch design, scans and data export for SPDC photon-pair
//! sources.
//!
//! Exit codes: 0 success, 1 invalid input or config, 2 numeric failure.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pairsource_core::designer::{design_with_curves, DesignConfig, IdlerRule, DEFAULT_XI};
use pairsource_core::dispersion::Catalog;
use pairsource_core::export::{self, Metadata, SCAN_SCHEMA};
use pairsource_core::heralding::{counts_to_efficiency, single_arm_efficiency, CountRecord, CALIBRATION_FLAG};
use pairsource_core::joint_amplitude::{
    joint_angular, joint_spectral, spectral_spatial, GridSpec, PartnerMode, Photon, PumpRegime, PumpSpec,
};
use pairsource_core::phasematching::{InteractionSpec, PhaseMatchSolution};
use pairsource_core::schmidt::{
    purity_vs_collection, purity_vs_pump_waist, schmidt_decompose, schmidt_decompose_intensity, IntensityPath,
};
use pairsource_core::toy_model::{self, Grid1D, Projected};
use pairsource_core::SpdcError;

use config::{JsaKind, PhotonArg, RunConfig, ScanBlock, ScanKind};
use output::{flat_csv, to_json, Format, OutputArgs};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<SpdcError> for CliError {
    fn from(e: SpdcError) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "pairsource", version, about = "Design and analysis of SPDC photon-pair sources")]
struct Cli {
    /// Directory of crystal JSON files replacing the built-in catalog.
    #[arg(long, global = true)]
    catalog_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List or show catalog crystals.
    Crystals {
        #[command(subcommand)]
        action: CrystalsCmd,
    },
    /// Solve the collinear phasematching condition.
    Solve(SolveArgs),
    /// Joint spectral, angular or spectral-spatial function on a grid.
    Jsa(JsaArgs),
    /// Purity scans over pump waist or collection angle.
    Scan(ScanArgs),
    /// Run the full source design.
    Design(DesignArgs),
    /// Heralding efficiencies from measured count rates.
    Efficiency(EfficiencyArgs),
    /// One-dimensional heralding toy model.
    Toy(ToyArgs),
}

#[derive(Subcommand)]
enum CrystalsCmd {
    List {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    Show {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags shared by every model command; they override the config file.
#[derive(Args, Default)]
struct ModelArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog crystal name.
    #[arg(long)]
    crystal: Option<String>,
    /// Pump wavelength (m).
    #[arg(long)]
    lambda_p: Option<f64>,
    /// Signal wavelength (m); the idler follows from energy conservation.
    #[arg(long)]
    lambda_s: Option<f64>,
    /// Pump temporal regime
    #[arg(long, value_enum)]
    pump: Option<RegimeArg>,
    /// Pump pulse intensity FWHM (s).
    #[arg(long)]
    duration: Option<f64>,
    /// Pump 1/e^2 intensity waist (m).
    #[arg(long)]
    waist: Option<f64>,
    /// Samples per grid axis
    #[arg(long)]
    points: Option<usize>,
    /// Pump spectral samples for pulsed traces
    #[arg(long)]
    pump_samples: Option<usize>,
    /// Grid half window in estimated 1/e^2 half-widths
    #[arg(long)]
    window_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum RegimeArg {
    Cw,
    Pulsed,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct JsaArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum)]
    kind: Option<JsaKind>,
    #[arg(long, value_enum)]
    photon: Option<PhotonArg>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum)]
    kind: Option<ScanKind>,
    /// Comma-separated scan values: waists (m) or full signal acceptance angles (rad).
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Idler/signal acceptance ratio for collection scans.
    #[arg(long)]
    ratio: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct DesignArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Target pump focusing parameter.
    #[arg(long)]
    xi: Option<f64>,
    /// Allowed plateau spread as a fraction of the phasematching bandwidth
    #[arg(long)]
    plateau_fraction: Option<f64>,
    #[arg(long, value_enum)]
    idler_rule: Option<IdlerRuleArg>,
    /// Write CSV dumps of the intermediate functions here.
    #[arg(long)]
    curves_dir: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum IdlerRuleArg {
    RidgeTransfer,
    TotalSpread,
}

#[derive(Args)]
struct EfficiencyArgs {
    /// JSON count record; flags override its fields.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Reduce one arm only, heralded by the other arm's singles. Needed when
    /// the two efficiencies come from separate measurements.
    #[arg(long, value_enum)]
    arm: Option<ArmArg>,
    /// Coincidence rate (Hz).
    #[arg(long)]
    coincidences: Option<f64>,
    /// Signal singles rate (Hz).
    #[arg(long)]
    singles_signal: Option<f64>,
    /// Idler singles rate (Hz).
    #[arg(long)]
    singles_idler: Option<f64>,
    /// Signal detector efficiency.
    #[arg(long)]
    eta_signal: Option<f64>,
    /// Idler detector efficiency.
    #[arg(long)]
    eta_idler: Option<f64>,
    /// Signal path transmission.
    #[arg(long)]
    t_signal: Option<f64>,
    /// Idler path transmission.
    #[arg(long)]
    t_idler: Option<f64>,
    /// Signal detector noise rate (Hz).
    #[arg(long)]
    noise_signal: Option<f64>,
    /// Idler detector noise rate (Hz).
    #[arg(long)]
    noise_idler: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ToyArgs {
    /// Pump transverse momentum (rad/m).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    k_p: f64,
    /// Fiber mode width (m).
    #[arg(long)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = ProjectedArg::Idler)]
    projected: ProjectedArg,
    #[arg(long, default_value_t = toy_model::DEFAULT_POINTS)]
    points: usize,
    /// Half span of the position grid in units of sigma.
    #[arg(long, default_value_t = toy_model::DEFAULT_SPAN_SIGMAS)]
    span_sigmas: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ArmArg {
    Signal,
    Idler,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ProjectedArg {
    Idler,
    Signal,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let catalog = match &cli.catalog_dir {
        Some(d) => Catalog::load_dir(d)?,
        None => Catalog::builtin(),
    };
    match cli.cmd {
        Cmd::Crystals { action } => crystals(&catalog, action),
        Cmd::Solve(a) => solve(&catalog, a),
        Cmd::Jsa(a) => jsa(&catalog, a),
        Cmd::Scan(a) => scan(&catalog, a),
        Cmd::Design(a) => run_design(&catalog, a),
        Cmd::Efficiency(a) => efficiency(a),
        Cmd::Toy(a) => toy(a),
    }
}

#[derive(Serialize)]
struct CrystalRow<'a> {
    name: &'a str,
    pm_type: pairsource_core::dispersion::PmType,
    length: f64,
    sources: Vec<&'a str>,
}

fn crystals(catalog: &Catalog, action: CrystalsCmd) -> Result<(), CliError> {
    match action {
        CrystalsCmd::List { format } => {
            let rows: Vec<CrystalRow> = catalog
                .iter()
                .map(|c| CrystalRow {
                    name: &c.name,
                    pm_type: c.pm_type,
                    length: c.length(),
                    sources: c.sellmeier.iter().map(|s| s.source.as_str()).collect(),
                })
                .collect();
            let text = match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => flat_csv("pairsource.crystals/1", &Metadata::new(), &rows)?,
            };
            print!("{text}");
            Ok(())
        }
        CrystalsCmd::Show { name, out } => {
            let mut text = catalog.get(&name)?.to_json_pretty()?;
            text.push('\n');
            OutputArgs { out, format: Format::Json }.emit(&text)
        }
    }
}

/// Everything a model command needs, after merging config and flags.
struct Model {
    spec: InteractionSpec,
    solution: PhaseMatchSolution,
    regime: PumpRegime,
    waist: Option<f64>,
    grid: GridSpec,
    cfg: RunConfig,
}

impl Model {
    fn pump(&self) -> Result<PumpSpec, CliError> {
        let waist = match self.waist {
            Some(w) => w,
            None => pairsource_core::designer::choose_pump_waist(self.spec.lambda_p, self.spec.length(), DEFAULT_XI, None)?.waist,
        };
        Ok(PumpSpec::new(self.spec.lambda_p, self.regime, waist)?)
    }

    fn metadata(&self) -> Metadata {
        let mut m: Metadata = vec![
            ("generator".into(), format!("pairsource {}", env!("CARGO_PKG_VERSION"))),
            ("crystal".into(), self.spec.crystal.name.clone()),
            ("lambda_p_m".into(), format!("{:e}", self.spec.lambda_p)),
            ("lambda_s_m".into(), format!("{:e}", self.spec.lambda_s)),
            ("lambda_i_m".into(), format!("{:e}", self.spec.lambda_i)),
            ("crystal_length_m".into(), format!("{:e}", self.spec.length())),
        ];
        m.push(("pump_regime".into(), match self.regime {
            PumpRegime::Cw => "cw".into(),
            PumpRegime::Pulsed { duration_fwhm } => format!("pulsed duration_fwhm_s={duration_fwhm:e}"),
        }));
        if let Ok(p) = self.pump() {
            m.push(("pump_waist_m".into(), format!("{:e}", p.waist)));
        }
        m.push(("grid_points".into(), self.grid.points.to_string()));
        m.push(("pump_samples".into(), self.grid.pump_samples.to_string()));
        m
    }
}

fn resolve(catalog: &Catalog, a: &ModelArgs) -> Result<Model, CliError> {
    let mut cfg = match (&a.config, &a.crystal) {
        (Some(p), _) => RunConfig::load(p)?,
        (None, Some(name)) => RunConfig::for_crystal(name),
        (None, None) => return Err(CliError::Input("give --config or --crystal".into())),
    };
    if let Some(name) = &a.crystal {
        cfg.crystal = serde_json::Value::String(name.clone());
    }
    let crystal = cfg.crystal_spec(catalog)?;

    let mut spec = match (cfg.interaction.as_ref(), a.lambda_p, a.lambda_s) {
        (None, None, None) => InteractionSpec::catalog_default(&crystal)?,
        (block, lp, ls) => {
            let template = crystal.defaults.interaction.as_ref();
            let lambda_p = lp.or(block.map(|b| b.lambda_p)).or(template.map(|t| t.lambda_p));
            let lambda_s = ls.or(block.map(|b| b.lambda_s)).or(template.map(|t| t.lambda_s));
            let pol = block
                .and_then(|b| b.polarization.clone())
                .or(template.map(|t| t.polarization.clone()));
            let (Some(lp), Some(ls), Some(pol)) = (lambda_p, lambda_s, pol) else {
                return Err(CliError::Input(format!(
                    "crystal {} has no default interaction; give lambda_p, lambda_s and polarization",
                    crystal.name
                )));
            };
            let mut s = InteractionSpec::new(crystal.clone(), lp, ls, pol)?;
            s.tuning_bracket = template.and_then(|t| t.tuning_bracket);
            s
        }
    };
    let solution = spec.solve()?;

    let default_pump = crystal.defaults.pump.clone();
    let regime = match a.pump {
        Some(RegimeArg::Cw) => PumpRegime::Cw,
        Some(RegimeArg::Pulsed) => {
            let known = [cfg.pump.regime, default_pump.as_ref().map(|p| p.regime)]
                .into_iter()
                .flatten()
                .find_map(|r| match r {
                    PumpRegime::Pulsed { duration_fwhm } => Some(duration_fwhm),
                    PumpRegime::Cw => None,
                });
            match a.duration.or(known) {
                Some(d) => PumpRegime::Pulsed { duration_fwhm: d },
                None => return Err(CliError::Input("pulsed pump needs --duration".into())),
            }
        }
        None => {
            let r = cfg.pump.regime.or(default_pump.as_ref().map(|p| p.regime)).unwrap_or(PumpRegime::Cw);
            match (r, a.duration) {
                (PumpRegime::Pulsed { .. }, Some(d)) => PumpRegime::Pulsed { duration_fwhm: d },
                (r, _) => r,
            }
        }
    };
    let waist = a.waist.or(cfg.pump.waist).or(default_pump.and_then(|p| p.waist));

    let mut grid = cfg.grid.clone();
    if let Some(n) = a.points {
        grid.points = n;
    }
    if let Some(n) = a.pump_samples {
        grid.pump_samples = n;
    }
    if let Some(s) = a.window_scale {
        grid.window_scale = s;
    }
    grid.validate()?;
    Ok(Model { spec, solution, regime, waist, grid, cfg })
}

#[derive(Serialize)]
struct SolveReport<'a> {
    crystal: &'a str,
    lambda_p: f64,
    lambda_s: f64,
    lambda_i: f64,
    length: f64,
    #[serde(flatten)]
    solution: &'a PhaseMatchSolution,
}

fn solve(catalog: &Catalog, a: SolveArgs) -> Result<(), CliError> {
    let m = resolve(catalog, &a.model)?;
    let r = SolveReport {
        crystal: &m.spec.crystal.name,
        lambda_p: m.spec.lambda_p,
        lambda_s: m.spec.lambda_s,
        lambda_i: m.spec.lambda_i,
        length: m.spec.length(),
        solution: &m.solution,
    };
    let text = match a.out.format {
        Format::Json => to_json(&r)?,
        Format::Csv => flat_csv("pairsource.solve/1", &m.metadata(), &r)?,
    };
    a.out.emit(&text)?;
    eprintln!("{}: {:?}, residual {:.3e} rad/m", m.spec.crystal.name, m.solution.solution, m.solution.residual);
    Ok(())
}

fn jsa(catalog: &Catalog, a: JsaArgs) -> Result<(), CliError> {
    let m = resolve(catalog, &a.model)?;
    let pump = m.pump()?;
    let kind = a.kind.unwrap_or(m.cfg.jsa.kind);
    let photon = match a.photon.unwrap_or(m.cfg.jsa.photon) {
        PhotonArg::Signal => Photon::Signal,
        PhotonArg::Idler => Photon::Idler,
    };
    let mut meta = m.metadata();
    let (text, purity) = match kind {
        JsaKind::Spectral | JsaKind::Angular => {
            let amp = if kind == JsaKind::Spectral {
                joint_spectral(&m.spec, &pump, &m.grid)?
            } else {
                joint_angular(&m.spec, &pump, &m.grid)?
            };
            let purity = schmidt_decompose(&amp)?.purity;
            meta.push(("purity".into(), format!("{purity:e}")));
            let text = match a.out.format {
                Format::Json => export::amplitude_json(&amp, &meta).map_err(|e| CliError::Numeric(e.to_string()))? + "\n",
                Format::Csv => export::amplitude_csv(&amp, &meta),
            };
            (text, purity)
        }
        JsaKind::SpectralSpatial => {
            let map = spectral_spatial(&m.spec, &pump, photon, &m.grid, PartnerMode::Trace)?;
            let purity = schmidt_decompose_intensity(&map, IntensityPath::SqrtIntensity)?.purity;
            meta.push(("photon".into(), photon.name().into()));
            meta.push(("purity_sqrt_intensity".into(), format!("{purity:e}")));
            let text = match a.out.format {
                Format::Json => export::intensity_json(&map, &meta).map_err(|e| CliError::Numeric(e.to_string()))? + "\n",
                Format::Csv => export::intensity_csv(&map, &meta),
            };
            (text, purity)
        }
    };
    a.out.emit(&text)?;
    eprintln!("{:?} grid {}x{}, purity {purity:.6}", kind, m.grid.points, m.grid.points);
    Ok(())
}

fn scan(catalog: &Catalog, a: ScanArgs) -> Result<(), CliError> {
    let m = resolve(catalog, &a.model)?;
    let mut block = m.cfg.scan.clone().unwrap_or(ScanBlock {
        kind: ScanKind::PumpWaist,
        values: Vec::new(),
        ratio: pairsource_core::schmidt::COLLECTION_SCAN_RATIO,
        path: IntensityPath::default(),
    });
    if let Some(k) = a.kind {
        block.kind = k;
    }
    if let Some(v) = a.values {
        block.values = v;
    }
    if let Some(r) = a.ratio {
        block.ratio = r;
    }
    if block.values.is_empty() {
        return Err(CliError::Input("scan needs at least one value".into()));
    }
    let pump = m.pump()?;
    let (points, column) = match block.kind {
        ScanKind::PumpWaist => (purity_vs_pump_waist(&m.spec, &pump, &block.values, &m.grid)?, "pump_waist_m"),
        ScanKind::Collection => (
            purity_vs_collection(&m.spec, &pump, &block.values, block.ratio, &m.grid, block.path)?,
            "signal_acceptance_rad",
        ),
    };
    let mut meta = m.metadata();
    meta.push(("scan".into(), format!("{:?}", block.kind)));
    if block.kind == ScanKind::Collection {
        meta.push(("idler_signal_ratio".into(), format!("{:e}", block.ratio)));
    }
    let text = match a.out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct ScanJson<'a> {
                schema: &'static str,
                metadata: serde_json::Map<String, serde_json::Value>,
                x_name: &'static str,
                points: &'a [pairsource_core::schmidt::ScanPoint],
            }
            to_json(&ScanJson {
                schema: SCAN_SCHEMA,
                metadata: meta.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect(),
                x_name: column,
                points: &points,
            })?
        }
        Format::Csv => {
            let x: Vec<f64> = points.iter().map(|p| p.x).collect();
            let y: Vec<f64> = points.iter().map(|p| p.purity).collect();
            export::columns_csv(SCAN_SCHEMA, &meta, &[column, "purity"], &[&x, &y])
        }
    };
    a.out.emit(&text)?;
    eprintln!("{} scan points, purity {:.4} .. {:.4}", points.len(), points[0].purity, points[points.len() - 1].purity);
    Ok(())
}

fn run_design(catalog: &Catalog, a: DesignArgs) -> Result<(), CliError> {
    let m = resolve(catalog, &a.model)?;
    let d = &m.cfg.design;
    let config = DesignConfig {
        xi_target: a.xi.unwrap_or(d.xi_target),
        plateau_fraction: a.plateau_fraction.unwrap_or(d.plateau_fraction),
        idler_rule: match a.idler_rule {
            Some(IdlerRuleArg::RidgeTransfer) => IdlerRule::RidgeTransfer,
            Some(IdlerRuleArg::TotalSpread) => IdlerRule::TotalSpread,
            None => d.idler_rule,
        },
        grid: m.grid.clone(),
        lens_catalog: d.lens_catalog.clone(),
    };
    let (report, curves) = design_with_curves(&m.spec, m.regime, &config)?;
    let mut meta = m.metadata();
    meta.retain(|(k, _)| k != "pump_waist_m");
    meta.push(("pump_waist_m".into(), format!("{:e}", report.pump.waist)));
    if let Some(dir) = &a.curves_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        let files = [
            ("spectral_spatial.csv", export::intensity_csv(&curves.spectral_spatial, &meta)),
            ("joint_angular.csv", export::amplitude_csv(&curves.joint_angular, &meta)),
            ("collected_spectral_spatial.csv", export::intensity_csv(&curves.collected_spectral_spatial, &meta)),
        ];
        for (name, text) in files {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?;
        }
    }
    let text = match a.out.format {
        Format::Json => to_json(&report)?,
        Format::Csv => flat_csv("pairsource.design/1", &meta, &report)?,
    };
    a.out.emit(&text)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "signal {:.3} deg / {:.1} um, idler {:.3} deg / {:.1} um, mu_si {:.3}",
        report.signal.angular_spread.to_degrees(),
        report.signal.waist * 1e6,
        report.idler.angular_spread.to_degrees(),
        report.idler.waist * 1e6,
        report.predicted.mu_symmetric
    );
    Ok(())
}

fn efficiency(a: EfficiencyArgs) -> Result<(), CliError> {
    let mut v = match &a.record {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let rec: CountRecord = serde_path_to_error::deserialize(de)
                .map_err(|e| CliError::Input(format!("record key `{}`: {}", e.path(), e.inner())))?;
            Some(rec)
        }
        None => None,
    };
    let need = |name: &str, flag: Option<f64>, rec: Option<f64>| {
        flag.or(rec).ok_or_else(|| CliError::Input(format!("missing --{name}")))
    };
    let r = v.take();
    if let Some(arm) = a.arm {
        let c = need("coincidences", a.coincidences, r.map(|r| r.coincidences))?;
        let (name, mu) = match arm {
            ArmArg::Signal => ("signal", single_arm_efficiency(
                c,
                need("singles-idler", a.singles_idler, r.map(|r| r.singles_idler))?,
                a.noise_idler.or(r.map(|r| r.noise_idler)).unwrap_or(0.0),
                need("eta-signal", a.eta_signal, r.map(|r| r.detector_efficiency_signal))?,
                need("t-signal", a.t_signal, r.map(|r| r.transmission_signal))?,
            )?),
            ArmArg::Idler => ("idler", single_arm_efficiency(
                c,
                need("singles-signal", a.singles_signal, r.map(|r| r.singles_signal))?,
                a.noise_signal.or(r.map(|r| r.noise_signal)).unwrap_or(0.0),
                need("eta-idler", a.eta_idler, r.map(|r| r.detector_efficiency_idler))?,
                need("t-idler", a.t_idler, r.map(|r| r.transmission_idler))?,
            )?),
        };
        #[derive(Serialize)]
        struct ArmReport {
            arm: &'static str,
            mu: f64,
            inconsistent_calibration: bool,
        }
        let report = ArmReport { arm: name, mu, inconsistent_calibration: mu > CALIBRATION_FLAG };
        let text = match a.out.format {
            Format::Json => to_json(&report)?,
            Format::Csv => flat_csv("pairsource.efficiency/1", &Metadata::new(), &report)?,
        };
        a.out.emit(&text)?;
        if report.inconsistent_calibration {
            eprintln!("warning: {name} heralding efficiency {mu:.3} exceeds {CALIBRATION_FLAG}");
        }
        eprintln!("mu_{name} {mu:.3}");
        return Ok(());
    }
    let rec = CountRecord {
        coincidences: need("coincidences", a.coincidences, r.map(|r| r.coincidences))?,
        singles_signal: need("singles-signal", a.singles_signal, r.map(|r| r.singles_signal))?,
        singles_idler: need("singles-idler", a.singles_idler, r.map(|r| r.singles_idler))?,
        detector_efficiency_signal: need("eta-signal", a.eta_signal, r.map(|r| r.detector_efficiency_signal))?,
        detector_efficiency_idler: need("eta-idler", a.eta_idler, r.map(|r| r.detector_efficiency_idler))?,
        transmission_signal: need("t-signal", a.t_signal, r.map(|r| r.transmission_signal))?,
        transmission_idler: need("t-idler", a.t_idler, r.map(|r| r.transmission_idler))?,
        noise_signal: a.noise_signal.or(r.map(|r| r.noise_signal)).unwrap_or(0.0),
        noise_idler: a.noise_idler.or(r.map(|r| r.noise_idler)).unwrap_or(0.0),
    };
    let report = counts_to_efficiency(&rec)?;
    let text = match a.out.format {
        Format::Json => to_json(&report)?,
        Format::Csv => flat_csv("pairsource.efficiency/1", &Metadata::new(), &report)?,
    };
    a.out.emit(&text)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "mu_signal {:.3}, mu_idler {:.3}, mu_si {:.3}",
        report.mu_signal, report.mu_idler, report.mu_symmetric
    );
    Ok(())
}

fn toy(a: ToyArgs) -> Result<(), CliError> {
    let grid = Grid1D::symmetric(a.span_sigmas * a.sigma, a.points)?;
    let projected = match a.projected {
        ProjectedArg::Idler => Projected::Idler,
        ProjectedArg::Signal => Projected::Signal,
    };
    let numeric = toy_model::herald(a.k_p, a.sigma, &grid, projected)?;
    let closed = toy_model::heralded_closed_form(a.k_p, a.sigma, &grid)?;
    let fidelity = toy_model::fidelity(&numeric, &closed)?;
    // sigma is the standard deviation of |psi|^2.
    let (_, width) = numeric.moments();
    let slope = numeric.phase_slope(-a.sigma, a.sigma)?;
    let meta: Metadata = vec![
        ("k_p_rad_per_m".into(), format!("{:e}", a.k_p)),
        ("sigma_m".into(), format!("{:e}", a.sigma)),
        ("projected".into(), format!("{projected:?}").to_lowercase()),
        ("fidelity_closed_form".into(), format!("{fidelity:e}")),
        ("fitted_width_m".into(), format!("{width:e}")),
        ("phase_slope_rad_per_m".into(), format!("{slope:e}")),
    ];
    let text = match a.out.format {
        Format::Csv => export::wavefunction_csv(&numeric, &meta),
        Format::Json => {
            #[derive(Serialize)]
            struct ToyJson {
                k_p: f64,
                sigma: f64,
                projected: Projected,
                fidelity: f64,
                fitted_width: f64,
                phase_slope: f64,
                x: Vec<f64>,
                re: Vec<f64>,
                im: Vec<f64>,
            }
            to_json(&ToyJson {
                k_p: a.k_p,
                sigma: a.sigma,
                projected,
                fidelity,
                fitted_width: width,
                phase_slope: slope,
                x: grid.samples(),
                re: numeric.values.iter().map(|z| z.re).collect(),
                im: numeric.values.iter().map(|z| z.im).collect(),
            })?
        }
    };
    a.out.emit(&text)?;
    eprintln!("fidelity {fidelity:.9}, width {width:.4e} m, phase slope {slope:.4e} rad/m");
    Ok(())
}
