//! CSV and JSON layouts for grids, scans and 1-D curves.
//!
//! CSV files start with `# key: value` metadata lines, then one header row
//! naming each column with its SI unit, then data rows. Floats are written
//! in shortest round-trip scientific notation so identical inputs give
//! byte-identical files.
//!
//! Grid layout `pairsource.grid/1`: one row per grid cell, row-major in
//! `axis_x` then `axis_y`. Amplitudes carry `re,im,abs2`; intensities a
//! single `intensity` column. The JSON form holds both axes and flat
//! row-major value arrays.

use std::fmt::Write as _;

use serde::Serialize;

use crate::joint_amplitude::{Axis, IntensityGrid, JointAmplitude};
use crate::toy_model::Wavefunction1D;

pub const GRID_SCHEMA: &str = "pairsource.grid/1";
pub const SCAN_SCHEMA: &str = "pairsource.scan/1";
pub const CURVE_SCHEMA: &str = "pairsource.curve/1";

/// Ordered `# key: value` header lines.
pub type Metadata = Vec<(String, String)>;

fn header(out: &mut String, schema: &str, meta: &Metadata) {
    let _ = writeln!(out, "# schema: {schema}");
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}: {v}");
    }
}

fn axis_line(out: &mut String, name: &str, axis: &Axis) {
    let _ = writeln!(
        out,
        "# {name}: {} [{}] n={} from {:e} to {:e}",
        axis.variable.name(),
        axis.units,
        axis.len(),
        axis.first(),
        axis.last()
    );
}

fn column(axis: &Axis) -> String {
    format!("{}_{}", axis.variable.name(), axis.units)
}

pub fn amplitude_csv(amp: &JointAmplitude, meta: &Metadata) -> String {
    let mut out = String::new();
    header(&mut out, GRID_SCHEMA, meta);
    let _ = writeln!(out, "# kind: amplitude");
    axis_line(&mut out, "x", &amp.axis_x);
    axis_line(&mut out, "y", &amp.axis_y);
    let _ = writeln!(out, "{},{},re,im,abs2", column(&amp.axis_x), column(&amp.axis_y));
    for (ix, x) in amp.axis_x.samples.iter().enumerate() {
        for (iy, y) in amp.axis_y.samples.iter().enumerate() {
            let z = amp.get(ix, iy);
            let _ = writeln!(out, "{x:e},{y:e},{:e},{:e},{:e}", z.re, z.im, z.norm_sqr());
        }
    }
    out
}

pub fn intensity_csv(grid: &IntensityGrid, meta: &Metadata) -> String {
    let mut out = String::new();
    header(&mut out, GRID_SCHEMA, meta);
    let _ = writeln!(out, "# kind: intensity");
    axis_line(&mut out, "x", &grid.axis_x);
    axis_line(&mut out, "y", &grid.axis_y);
    let _ = writeln!(out, "{},{},intensity", column(&grid.axis_x), column(&grid.axis_y));
    for (ix, x) in grid.axis_x.samples.iter().enumerate() {
        for (iy, y) in grid.axis_y.samples.iter().enumerate() {
            let _ = writeln!(out, "{x:e},{y:e},{:e}", grid.get(ix, iy));
        }
    }
    out
}

#[derive(Serialize)]
struct GridJson<'a> {
    schema: &'static str,
    kind: &'static str,
    metadata: serde_json::Map<String, serde_json::Value>,
    axis_x: &'a Axis,
    axis_y: &'a Axis,
    #[serde(skip_serializing_if = "Option::is_none")]
    values_re: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values_im: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<&'a [f64]>,
}

fn meta_map(meta: &Metadata) -> serde_json::Map<String, serde_json::Value> {
    meta.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect()
}

pub fn amplitude_json(amp: &JointAmplitude, meta: &Metadata) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&GridJson {
        schema: GRID_SCHEMA,
        kind: "amplitude",
        metadata: meta_map(meta),
        axis_x: &amp.axis_x,
        axis_y: &amp.axis_y,
        values_re: Some(amp.values.iter().map(|z| z.re).collect()),
        values_im: Some(amp.values.iter().map(|z| z.im).collect()),
        values: None,
    })
}

pub fn intensity_json(grid: &IntensityGrid, meta: &Metadata) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&GridJson {
        schema: GRID_SCHEMA,
        kind: "intensity",
        metadata: meta_map(meta),
        axis_x: &grid.axis_x,
        axis_y: &grid.axis_y,
        values_re: None,
        values_im: None,
        values: Some(&grid.values),
    })
}

/// Two or more named columns of equal length.
pub fn columns_csv(schema: &str, meta: &Metadata, names: &[&str], cols: &[&[f64]]) -> String {
    let mut out = String::new();
    header(&mut out, schema, meta);
    let _ = writeln!(out, "{}", names.join(","));
    let rows = cols.iter().map(|c| c.len()).min().unwrap_or(0);
    for r in 0..rows {
        let line: Vec<String> = cols.iter().map(|c| format!("{:e}", c[r])).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// `x, Re, Im, |psi|^2` of a 1-D wavefunction.
pub fn wavefunction_csv(psi: &Wavefunction1D, meta: &Metadata) -> String {
    let x = psi.grid.samples();
    let re: Vec<f64> = psi.values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.values.iter().map(|z| z.im).collect();
    let p: Vec<f64> = psi.values.iter().map(|z| z.norm_sqr()).collect();
    let coord = match psi.basis {
        crate::toy_model::Basis::Position => "x_m",
        crate::toy_model::Basis::Momentum => "k_rad_per_m",
    };
    columns_csv(CURVE_SCHEMA, meta, &[coord, "re", "im", "abs2"], &[&x, &re, &im, &p])
}
