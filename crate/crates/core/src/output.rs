//! Result files: one CSV per quantity, a mask CSV, the JSON report and a
//! plotting script template. Output bytes depend only on the configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::circuit::{quantize, Quantized};
use crate::config::{to_toml, RunConfig};
use crate::error::{Error, Result};
use crate::sweep::{
    compare_backends, entangled_fraction_below_gm, entangled_mask, entangled_region,
    region_overlap, BackendDiscrepancy, OverlapStatistic, RegionSummary, SweepResult,
};

/// Bumped whenever a report field is renamed, removed or changes meaning.
pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "omega_rad_s,gm_a_per_v,value";
pub const MASK_HEADER: &str = "omega_rad_s,gm_a_per_v,reasons";
pub const MASK_FILE: &str = "mask.csv";
pub const REPORT_FILE: &str = "report.json";
pub const PLOT_SCRIPT_FILE: &str = "plot_maps.py";
/// Fraction of lowest-NF cells compared against the entangled region.
pub const NF_DECILE: f64 = 0.1;
/// g_m limit (A/V) for the low-transconductance entangled fraction.
pub const LOW_GM_LIMIT: f64 = 0.02;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn grid_csv(result: &SweepResult, grid: &[Option<f64>]) -> String {
    let mut out = String::with_capacity(48 * grid.len() + 32);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (idx, value) in grid.iter().enumerate() {
        let (w, g) = result.coordinates(idx);
        match value {
            Some(v) => writeln!(out, "{w:e},{g:e},{v:e}"),
            None => writeln!(out, "{w:e},{g:e},"),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

fn mask_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(MASK_HEADER);
    out.push('\n');
    for (idx, reasons) in result.mask.iter().enumerate() {
        let (w, g) = result.coordinates(idx);
        let codes: Vec<&str> = reasons.iter().map(|r| r.code()).collect();
        writeln!(out, "{w:e},{g:e},{}", codes.join(";")).expect("writing to a String cannot fail");
    }
    out
}

/// One `<quantity>.csv` per grid plus `mask.csv`, row-major in (g_m, omega).
/// Masked cells have an empty value field. Returns the written paths.
pub fn write_grid_csv(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (name, grid) in result.quantities() {
        let path = dir.join(format!("{name}.csv"));
        write_file(&path, &grid_csv(result, grid))?;
        written.push(path);
    }
    let path = dir.join(MASK_FILE);
    write_file(&path, &mask_csv(result))?;
    written.push(path);
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelConstants {
    /// A/V
    pub g_m: f64,
    /// F
    pub capacitance_matrix: [[f64; 2]; 2],
    pub h_qq: [[f64; 2]; 2],
    pub h_pp: [[f64; 2]; 2],
    pub h_qp: [[f64; 2]; 2],
    pub d_q: [f64; 2],
    pub d_p: [f64; 2],
    /// rad/s
    pub omega1: f64,
    pub omega2: f64,
    /// Ohm
    pub z1: f64,
    pub z2: f64,
    /// rad/s
    pub kappa1: f64,
    pub kappa2: f64,
    pub a1: ComplexValue,
    pub a2: ComplexValue,
    pub a3: ComplexValue,
    pub b1: ComplexValue,
    pub b2: ComplexValue,
    pub b3: ComplexValue,
    pub e1: ComplexValue,
    pub e2: ComplexValue,
}

fn rows(m: &nalgebra::Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

impl From<&Quantized> for ModelConstants {
    fn from(q: &Quantized) -> Self {
        let m = &q.model;
        let h = &q.hamiltonian;
        Self {
            g_m: m.g_m,
            capacitance_matrix: rows(&q.capacitance.c),
            h_qq: rows(&h.h_qq),
            h_pp: rows(&h.h_pp),
            h_qp: rows(&h.h_qp),
            d_q: [h.d_q[0], h.d_q[1]],
            d_p: [h.d_p[0], h.d_p[1]],
            omega1: m.omega1,
            omega2: m.omega2,
            z1: m.z1,
            z2: m.z2,
            kappa1: m.kappa1,
            kappa2: m.kappa2,
            a1: m.a1.into(),
            a2: m.a2.into(),
            a3: m.a3.into(),
            b1: m.b1.into(),
            b2: m.b2.into(),
            b3: m.b3.into(),
            e1: m.e1.into(),
            e2: m.e2.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// sha256 of the canonical TOML form of the circuit and sweep blocks
    pub config_sha256: String,
    pub artifact_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub omega_points: usize,
    pub gm_points: usize,
    pub backend: String,
    /// V
    pub v_rf: f64,
    pub masked_cells: usize,
    pub mask_reasons: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub grid: GridSummary,
    /// Quantized model at the configured base transconductance.
    pub model: ModelConstants,
    /// `None` when every cell failed.
    pub entangled_region: Option<RegionSummary>,
    pub nf_overlap: OverlapStatistic,
    /// A/V
    pub low_gm_limit: f64,
    pub low_gm_entangled_fraction: Option<f64>,
    pub backend_discrepancy: BackendDiscrepancy,
}

/// Hash of everything that determines the results. The output block is
/// left out so the same run written elsewhere keeps its hash.
pub fn config_hash(config: &RunConfig) -> String {
    let canonical = RunConfig {
        sweep: config.sweep,
        output: Default::default(),
    };
    hex::encode(Sha256::digest(to_toml(&canonical).as_bytes()))
}

pub fn build_report(config: &RunConfig, result: &SweepResult) -> Result<Report> {
    let quantized = quantize(config.circuit())?;
    let mut mask_reasons = BTreeMap::new();
    for reasons in &result.mask {
        for r in reasons {
            *mask_reasons.entry(r.code().to_string()).or_insert(0) += 1;
        }
    }
    let entangled = entangled_region(result).ok();
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION,
        provenance: Provenance {
            config_sha256: config_hash(config),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        grid: GridSummary {
            omega_points: result.omega.len(),
            gm_points: result.gm.len(),
            backend: config.sweep.backend.to_string(),
            v_rf: config.sweep.v_rf,
            masked_cells: result.mask.iter().filter(|m| !m.is_empty()).count(),
            mask_reasons,
        },
        model: ModelConstants::from(&quantized),
        entangled_region: entangled,
        nf_overlap: region_overlap(&entangled_mask(result), &result.nf_db, NF_DECILE)?,
        low_gm_limit: LOW_GM_LIMIT,
        low_gm_entangled_fraction: entangled_fraction_below_gm(result, LOW_GM_LIMIT),
        backend_discrepancy: compare_backends(&config.sweep, 1.0)?,
    })
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is plain data");
    s.push('\n');
    s
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    write_file(path, &report_json(report))
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Heat maps of the sweep grids in this directory (numpy + matplotlib)."""
import csv
import pathlib
import sys

import matplotlib.pyplot as plt
import numpy as np

QUANTITIES = ["epsilon_e", "nf_db", "g_m_circuit", "t_noise", "n1ph", "n2ph", "n12ph_abs"]


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    omega = sorted({float(r["omega_rad_s"]) for r in rows})
    gm = sorted({float(r["gm_a_per_v"]) for r in rows})
    grid = np.full((len(gm), len(omega)), np.nan)
    for k, r in enumerate(rows):
        if r["value"]:
            grid[k // len(omega), k % len(omega)] = float(r["value"])
    return np.array(omega), np.array(gm), grid


def main(directory):
    directory = pathlib.Path(directory)
    for name in QUANTITIES:
        path = directory / f"{name}.csv"
        if not path.exists():
            continue
        omega, gm, grid = load(path)
        fig, ax = plt.subplots(figsize=(6, 4.5))
        extent = [omega[0] / 2e9 / np.pi, omega[-1] / 2e9 / np.pi, gm[0] * 1e3, gm[-1] * 1e3]
        im = ax.imshow(grid, origin="lower", aspect="auto", extent=extent)
        if name == "epsilon_e":
            ax.contour(grid, levels=[1.0], colors="w", origin="lower", extent=extent)
        ax.set_xlabel("frequency (GHz)")
        ax.set_ylabel("g_m (mS)")
        ax.set_title(name)
        fig.colorbar(im, ax=ax)
        fig.savefig(directory / f"{name}.png", dpi=150, bbox_inches="tight")
        plt.close(fig)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).parent)
"#;

pub fn write_plot_script(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(PLOT_SCRIPT_FILE);
    write_file(&path, PLOT_SCRIPT)?;
    Ok(path)
}
