//! Grid evaluation over (probe frequency, transconductance) and region
//! statistics on the resulting maps.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{quantize, CircuitParams, QuantizedModel};
use crate::error::{Error, Result};
use crate::metrics::{
    circuit_transconductance, entanglement_metric, noise_figure, EntanglementReport, NoiseReport,
};
use crate::spectral::{
    build_spectral_system, input_occupations, solve_moments_closure, solve_moments_covariance,
    MomentSet, ThermalReference,
};

/// Environment variable overriding the sweep worker count.
pub const WORKERS_ENV: &str = "LNA_ENTANGLE_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    /// `min + (max - min) k / (n - 1)`. Refining n -> 2n - 1 reproduces the
    /// old points bit for bit.
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|k| self.min + span * (k as f64 / last))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Closure,
    #[default]
    Covariance,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Closure => "closure",
            Backend::Covariance => "covariance",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// rad/s
    pub omega_axis: Axis,
    /// A/V
    pub gm_axis: Axis,
    /// V
    pub v_rf: f64,
    pub backend: Backend,
    pub thermal_reference: ThermalReference,
    pub base: CircuitParams,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let mut fields = Vec::new();
        for (name, axis) in [("omega_axis", &self.omega_axis), ("gm_axis", &self.gm_axis)] {
            if axis.n < 1 {
                fields.push(format!("{name}.n must be >= 1"));
            }
            if !(axis.min.is_finite() && axis.max.is_finite()) {
                fields.push(format!("{name} bounds must be finite"));
            } else if axis.n > 1 && !(axis.min < axis.max) {
                fields.push(format!("{name}.min must be < {name}.max when n > 1"));
            }
        }
        if !(self.omega_axis.min > 0.0) {
            fields.push("omega_axis.min must be > 0".into());
        }
        if self.gm_axis.min < 0.0 {
            fields.push("gm_axis.min must be >= 0".into());
        }
        if !(self.v_rf.is_finite() && self.v_rf >= 0.0) {
            fields.push("v_rf must be finite and >= 0".into());
        }
        if let Err(e) = self.base.validate() {
            fields.push(format!("base: {e}"));
        }
        if fields.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSweep { fields })
        }
    }

    /// Circuit parameters at one grid row.
    pub fn params_at(&self, g_m: f64) -> CircuitParams {
        CircuitParams {
            g_m,
            v_rf: self.v_rf,
            ..self.base
        }
    }
}

/// Why a grid cell (or one of its quantities) is missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskReason {
    InvalidParameters,
    DegenerateCircuit,
    TemplateMismatch,
    ClosureSingular,
    SpectralSingular,
    UndefinedMetric,
    UnphysicalMoments,
    InfiniteNoiseFigure,
    ResonantPole,
    NonFinite,
}

impl MaskReason {
    pub fn code(&self) -> &'static str {
        match self {
            MaskReason::InvalidParameters => "invalid_parameters",
            MaskReason::DegenerateCircuit => "degenerate_circuit",
            MaskReason::TemplateMismatch => "template_mismatch",
            MaskReason::ClosureSingular => "closure_singular",
            MaskReason::SpectralSingular => "spectral_singular",
            MaskReason::UndefinedMetric => "undefined_metric",
            MaskReason::UnphysicalMoments => "unphysical_moments",
            MaskReason::InfiniteNoiseFigure => "infinite_noise_figure",
            MaskReason::ResonantPole => "resonant_pole",
            MaskReason::NonFinite => "non_finite",
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => MaskReason::InvalidParameters,
            Error::DegenerateCircuit { .. } => MaskReason::DegenerateCircuit,
            Error::TemplateMismatch { .. } => MaskReason::TemplateMismatch,
            Error::ClosureSingular { .. } => MaskReason::ClosureSingular,
            Error::SpectralSingular { .. } | Error::UnstableModel { .. } => {
                MaskReason::SpectralSingular
            }
            Error::UndefinedMetric { .. } => MaskReason::UndefinedMetric,
            Error::UnphysicalMoments { .. } => MaskReason::UnphysicalMoments,
            Error::InfiniteNoiseFigure { .. } => MaskReason::InfiniteNoiseFigure,
            Error::ResonantPole { .. } => MaskReason::ResonantPole,
            _ => MaskReason::NonFinite,
        }
    }
}

/// Full pipeline at one (omega, g_m) point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation {
    pub params: CircuitParams,
    pub model: QuantizedModel,
    pub moments: MomentSet,
    pub entanglement: std::result::Result<EntanglementReport, MaskReason>,
    pub noise: std::result::Result<NoiseReport, MaskReason>,
    pub g_m_circuit: std::result::Result<f64, MaskReason>,
}

pub fn evaluate_point(
    params: &CircuitParams,
    omega: f64,
    backend: Backend,
    thermal_reference: ThermalReference,
) -> Result<PointEvaluation> {
    let model = quantize(params)?.model;
    let moments = moments_at(&model, omega, params.t_c, backend, thermal_reference)?;
    let entanglement = entanglement_metric(&moments).map_err(|e| MaskReason::from_error(&e));
    let noise = noise_figure(params, omega).map_err(|e| MaskReason::from_error(&e));
    let g_m_circuit = match &noise {
        Ok(n) => Ok(n.g_m_circuit),
        Err(_) => circuit_transconductance(params, omega).map_err(|e| MaskReason::from_error(&e)),
    };
    Ok(PointEvaluation {
        params: *params,
        model,
        moments,
        entanglement,
        noise,
        g_m_circuit,
    })
}

pub fn moments_at(
    model: &QuantizedModel,
    omega: f64,
    temperature: f64,
    backend: Backend,
    thermal_reference: ThermalReference,
) -> Result<MomentSet> {
    let (n1bar, n2bar) = input_occupations(model, omega, temperature, thermal_reference);
    let sys = build_spectral_system(model, omega);
    match backend {
        Backend::Closure => solve_moments_closure(&sys, n1bar, n2bar),
        Backend::Covariance => solve_moments_covariance(&sys, n1bar, n2bar),
    }
}

/// Row-major grid, row = g_m index, column = omega index.
pub type Grid = Vec<Option<f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub omega: Vec<f64>,
    pub gm: Vec<f64>,
    pub epsilon_e: Grid,
    pub nf_db: Grid,
    pub g_m_circuit: Grid,
    pub t_noise: Grid,
    pub n1ph: Grid,
    pub n2ph: Grid,
    pub n12ph_abs: Grid,
    /// Reasons for every missing value in the cell; empty when complete.
    pub mask: Vec<Vec<MaskReason>>,
}

impl SweepResult {
    pub fn shape(&self) -> (usize, usize) {
        (self.gm.len(), self.omega.len())
    }

    pub fn len(&self) -> usize {
        self.gm.len() * self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (omega, g_m) at a flat index.
    pub fn coordinates(&self, index: usize) -> (f64, f64) {
        let cols = self.omega.len();
        (self.omega[index % cols], self.gm[index / cols])
    }

    /// Named quantity grids, in output order.
    pub fn quantities(&self) -> [(&'static str, &Grid); 7] {
        [
            ("epsilon_e", &self.epsilon_e),
            ("nf_db", &self.nf_db),
            ("g_m_circuit", &self.g_m_circuit),
            ("t_noise", &self.t_noise),
            ("n1ph", &self.n1ph),
            ("n2ph", &self.n2ph),
            ("n12ph_abs", &self.n12ph_abs),
        ]
    }

    /// True when no cell produced a moment set.
    pub fn all_failed(&self) -> bool {
        self.n1ph.iter().all(Option::is_none)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Cell {
    values: [Option<f64>; 7],
    reasons: Vec<MaskReason>,
}

fn finite(v: f64, reasons: &mut Vec<MaskReason>) -> Option<f64> {
    if v.is_finite() {
        Some(v)
    } else {
        if !reasons.contains(&MaskReason::NonFinite) {
            reasons.push(MaskReason::NonFinite);
        }
        None
    }
}

fn evaluate_cell(config: &SweepConfig, omega: f64, g_m: f64) -> Cell {
    let params = config.params_at(g_m);
    let mut reasons = Vec::new();
    let point = match evaluate_point(&params, omega, config.backend, config.thermal_reference) {
        Ok(p) => p,
        Err(e) => {
            return Cell {
                values: [None; 7],
                reasons: vec![MaskReason::from_error(&e)],
            }
        }
    };
    let take = |r: std::result::Result<f64, MaskReason>, reasons: &mut Vec<MaskReason>| match r {
        Ok(v) => finite(v, reasons),
        Err(reason) => {
            if !reasons.contains(&reason) {
                reasons.push(reason);
            }
            None
        }
    };
    let epsilon = take(point.entanglement.map(|e| e.epsilon_e), &mut reasons);
    let nf = take(point.noise.map(|n| n.nf_db), &mut reasons);
    let gmc = take(point.g_m_circuit, &mut reasons);
    let tn = take(point.noise.map(|n| n.t_noise), &mut reasons);
    let n1 = finite(point.moments.n1ph, &mut reasons);
    let n2 = finite(point.moments.n2ph, &mut reasons);
    let n12 = finite(point.moments.n12ph.norm(), &mut reasons);
    Cell {
        values: [epsilon, nf, gmc, tn, n1, n2, n12],
        reasons,
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with_workers(config, workers_from_env())
}

/// Evaluate every grid point. Failed points are masked, never fatal; the
/// result does not depend on the worker count.
pub fn run_sweep_with_workers(config: &SweepConfig, workers: Option<usize>) -> Result<SweepResult> {
    config.validate()?;
    let omega = config.omega_axis.values();
    let gm = config.gm_axis.values();
    let cols = omega.len();
    let total = cols * gm.len();

    let compute = || -> Vec<Cell> {
        (0..total)
            .into_par_iter()
            .map(|idx| evaluate_cell(config, omega[idx % cols], gm[idx / cols]))
            .collect()
    };
    let cells = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(compute))
            .unwrap_or_else(|_| compute()),
        None => compute(),
    };

    let column = |k: usize| cells.iter().map(|c| c.values[k]).collect::<Grid>();
    Ok(SweepResult {
        epsilon_e: column(0),
        nf_db: column(1),
        g_m_circuit: column(2),
        t_noise: column(3),
        n1ph: column(4),
        n2ph: column(5),
        n12ph_abs: column(6),
        mask: cells.into_iter().map(|c| c.reasons).collect(),
        omega,
        gm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSummary {
    pub entangled_cells: usize,
    pub valid_cells: usize,
    pub area_fraction: f64,
    pub max_epsilon_e: f64,
    /// rad/s
    pub argmax_omega: f64,
    /// A/V
    pub argmax_gm: f64,
}

/// Cells with epsilon_e > 1.
pub fn entangled_mask(result: &SweepResult) -> Vec<bool> {
    result
        .epsilon_e
        .iter()
        .map(|e| matches!(e, Some(v) if *v > 1.0))
        .collect()
}

pub fn entangled_region(result: &SweepResult) -> Result<RegionSummary> {
    let mut valid = 0;
    let mut entangled = 0;
    let mut best: Option<(f64, usize)> = None;
    for (idx, e) in result.epsilon_e.iter().enumerate() {
        let Some(v) = *e else { continue };
        valid += 1;
        if v > 1.0 {
            entangled += 1;
        }
        // first occurrence wins on ties
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, idx));
        }
    }
    let (max, idx) = best.ok_or(Error::EmptyRegion)?;
    let (argmax_omega, argmax_gm) = result.coordinates(idx);
    Ok(RegionSummary {
        entangled_cells: entangled,
        valid_cells: valid,
        area_fraction: entangled as f64 / valid as f64,
        max_epsilon_e: max,
        argmax_omega,
        argmax_gm,
    })
}

/// Entangled fraction of the valid cells with g_m <= `gm_limit`.
pub fn entangled_fraction_below_gm(result: &SweepResult, gm_limit: f64) -> Option<f64> {
    let cols = result.omega.len();
    let mut valid = 0usize;
    let mut entangled = 0usize;
    for (idx, e) in result.epsilon_e.iter().enumerate() {
        if result.gm[idx / cols] > gm_limit {
            continue;
        }
        if let Some(v) = e {
            valid += 1;
            if *v > 1.0 {
                entangled += 1;
            }
        }
    }
    (valid > 0).then(|| entangled as f64 / valid as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapStatistic {
    /// |entangled ∩ lowest-NF| / |entangled|; `None` for an empty entangled region.
    pub overlap: Option<f64>,
    /// Expected overlap of a random region of the same area.
    pub baseline: f64,
    pub entangled_cells: usize,
    pub low_nf_cells: usize,
    /// Largest NF (dB) inside the low-NF set.
    pub nf_threshold_db: Option<f64>,
}

/// Lowest-NF set: the `ceil(fraction * N)` smallest finite NF cells (ties
/// broken by index).
pub fn lowest_nf_mask(nf: &[Option<f64>], fraction: f64) -> (Vec<bool>, Option<f64>) {
    let mut finite: Vec<(f64, usize)> = nf
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.filter(|x| x.is_finite()).map(|x| (x, i)))
        .collect();
    finite.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let keep = ((fraction * finite.len() as f64).ceil() as usize).min(finite.len());
    let mut mask = vec![false; nf.len()];
    for &(_, i) in &finite[..keep] {
        mask[i] = true;
    }
    let threshold = keep.checked_sub(1).map(|k| finite[k].0);
    (mask, threshold)
}

pub fn region_overlap(
    entangled: &[bool],
    nf: &[Option<f64>],
    fraction: f64,
) -> Result<OverlapStatistic> {
    if entangled.len() != nf.len() {
        return Err(Error::InvalidSweep {
            fields: vec![format!(
                "mask length {} does not match NF grid length {}",
                entangled.len(),
                nf.len()
            )],
        });
    }
    let (low, nf_threshold_db) = lowest_nf_mask(nf, fraction);
    let entangled_cells = entangled.iter().filter(|&&e| e).count();
    let both = entangled.iter().zip(&low).filter(|(&e, &l)| e && l).count();
    Ok(OverlapStatistic {
        overlap: (entangled_cells > 0).then(|| both as f64 / entangled_cells as f64),
        baseline: fraction,
        entangled_cells,
        low_nf_cells: low.iter().filter(|&&l| l).count(),
        nf_threshold_db,
    })
}

/// Worst and median relative discrepancy between the two backends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BackendDiscrepancy {
    pub coupling_scale: f64,
    pub compared_cells: usize,
    pub max_rel_n1ph: f64,
    pub max_rel_n2ph: f64,
    pub max_rel_n12ph: f64,
    pub median_rel_n1ph: f64,
    pub median_rel_n2ph: f64,
    pub median_rel_n12ph: f64,
}

/// Relative deviation of `a` from the reference `b`.
fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Compare closure and covariance over the sweep grid with every coupling
/// coefficient scaled by `coupling_scale` (1.0 for the physical model).
/// Cells where either backend fails are skipped.
pub fn compare_backends(config: &SweepConfig, coupling_scale: f64) -> Result<BackendDiscrepancy> {
    config.validate()?;
    let omega = config.omega_axis.values();
    let gm = config.gm_axis.values();
    let rows: Vec<Vec<[f64; 3]>> = gm
        .par_iter()
        .map(|&g| {
            let params = config.params_at(g);
            let Ok(q) = quantize(&params) else {
                return Vec::new();
            };
            let model = q.model.with_couplings_scaled(coupling_scale);
            omega
                .iter()
                .filter_map(|&w| {
                    let a = moments_at(
                        &model,
                        w,
                        params.t_c,
                        Backend::Closure,
                        config.thermal_reference,
                    )
                    .ok()?;
                    let b = moments_at(
                        &model,
                        w,
                        params.t_c,
                        Backend::Covariance,
                        config.thermal_reference,
                    )
                    .ok()?;
                    Some([
                        rel(a.n1ph, b.n1ph),
                        rel(a.n2ph, b.n2ph),
                        rel(a.n12ph.norm(), b.n12ph.norm()),
                    ])
                })
                .collect()
        })
        .collect();
    let all: Vec<[f64; 3]> = rows.into_iter().flatten().collect();
    let column = |k: usize| all.iter().map(|r| r[k]).collect::<Vec<_>>();
    let (mut c1, mut c2, mut c3) = (column(0), column(1), column(2));
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(BackendDiscrepancy {
        coupling_scale,
        compared_cells: all.len(),
        max_rel_n1ph: max(&c1),
        max_rel_n2ph: max(&c2),
        max_rel_n12ph: max(&c3),
        median_rel_n1ph: median(&mut c1),
        median_rel_n2ph: median(&mut c2),
        median_rel_n12ph: median(&mut c3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(n_omega: usize, n_gm: usize) -> SweepConfig {
        let two_pi = 2.0 * std::f64::consts::PI;
        SweepConfig {
            omega_axis: Axis::new(two_pi * 5e9, two_pi * 9e9, n_omega),
            gm_axis: Axis::new(0.0, 0.1, n_gm),
            v_rf: 1e-3,
            backend: Backend::Covariance,
            thermal_reference: ThermalReference::Mode,
            base: CircuitParams::default(),
        }
    }

    fn synthetic(eps: Vec<Option<f64>>, cols: usize) -> SweepResult {
        let rows = eps.len() / cols;
        let n = eps.len();
        SweepResult {
            omega: (0..cols).map(|c| c as f64).collect(),
            gm: (0..rows).map(|r| r as f64).collect(),
            epsilon_e: eps,
            nf_db: vec![None; n],
            g_m_circuit: vec![None; n],
            t_noise: vec![None; n],
            n1ph: vec![None; n],
            n2ph: vec![None; n],
            n12ph_abs: vec![None; n],
            mask: vec![Vec::new(); n],
        }
    }

    #[test]
    fn axis_refinement_preserves_points() {
        let a = Axis::new(1.3e9, 9.7e10, 7).values();
        let b = Axis::new(1.3e9, 9.7e10, 13).values();
        for (k, v) in a.iter().enumerate() {
            assert_eq!(*v, b[2 * k]);
        }
        assert_eq!(Axis::new(2.0, 2.0, 1).values(), vec![2.0]);
    }

    #[test]
    fn invalid_config_lists_fields() {
        let mut c = small_config(3, 3);
        c.omega_axis.n = 0;
        c.gm_axis = Axis::new(0.1, 0.0, 4);
        match c.validate() {
            Err(Error::InvalidSweep { fields }) => {
                assert_eq!(fields.len(), 2);
                assert!(fields[0].contains("omega_axis"));
                assert!(fields[1].contains("gm_axis"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_cell_matches_point_pipeline() {
        let c = SweepConfig {
            omega_axis: Axis::new(5.1e10, 5.1e10, 1),
            gm_axis: Axis::new(0.03, 0.03, 1),
            ..small_config(1, 1)
        };
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.shape(), (1, 1));
        let p = evaluate_point(&c.params_at(0.03), 5.1e10, c.backend, c.thermal_reference).unwrap();
        assert_eq!(r.epsilon_e[0], Some(p.entanglement.unwrap().epsilon_e));
        assert_eq!(r.nf_db[0], Some(p.noise.unwrap().nf_db));
        assert_eq!(r.n1ph[0], Some(p.moments.n1ph));
        assert_eq!(r.n12ph_abs[0], Some(p.moments.n12ph.norm()));
        assert!(r.mask[0].is_empty());
    }

    #[test]
    fn order_independent_across_workers() {
        let c = small_config(9, 7);
        let one = run_sweep_with_workers(&c, Some(1)).unwrap();
        let four = run_sweep_with_workers(&c, Some(4)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn refinement_keeps_coincident_values() {
        let coarse = run_sweep(&small_config(4, 3)).unwrap();
        let fine = run_sweep(&small_config(7, 5)).unwrap();
        for r in 0..3 {
            for c in 0..4 {
                assert_eq!(coarse.n1ph[r * 4 + c], fine.n1ph[2 * r * 7 + 2 * c]);
                assert_eq!(
                    coarse.epsilon_e[r * 4 + c],
                    fine.epsilon_e[2 * r * 7 + 2 * c]
                );
            }
        }
    }

    #[test]
    fn zero_gm_row_masks_only_noise_figure() {
        let r = run_sweep(&small_config(3, 2)).unwrap();
        for c in 0..3 {
            assert!(r.nf_db[c].is_none());
            assert!(r.mask[c].contains(&MaskReason::InfiniteNoiseFigure));
            assert!(r.epsilon_e[c].is_some());
        }
    }

    #[test]
    fn mask_soundness() {
        let r = run_sweep(&small_config(6, 4)).unwrap();
        for (idx, reasons) in r.mask.iter().enumerate() {
            let missing = r.quantities().iter().any(|(_, g)| g[idx].is_none());
            assert_eq!(missing, !reasons.is_empty());
            for (_, g) in r.quantities() {
                if let Some(v) = g[idx] {
                    assert!(v.is_finite());
                }
            }
        }
    }

    #[test]
    fn region_examples() {
        let r = synthetic(vec![Some(0.0); 4], 2);
        let s = entangled_region(&r).unwrap();
        assert_eq!(s.area_fraction, 0.0);

        let r = synthetic(vec![Some(0.2), Some(0.3), Some(1.5), Some(0.9)], 2);
        let s = entangled_region(&r).unwrap();
        assert_eq!(s.area_fraction, 0.25);
        assert_eq!(s.max_epsilon_e, 1.5);
        assert_eq!((s.argmax_omega, s.argmax_gm), (0.0, 1.0));

        let r = synthetic(vec![None; 4], 2);
        assert!(matches!(entangled_region(&r), Err(Error::EmptyRegion)));
    }

    #[test]
    fn overlap_examples() {
        let nf: Vec<Option<f64>> = (0..20).map(|k| Some(k as f64)).collect();
        let (low, thr) = lowest_nf_mask(&nf, 0.1);
        assert_eq!(low.iter().filter(|&&b| b).count(), 2);
        assert_eq!(thr, Some(1.0));

        let s = region_overlap(&low, &nf, 0.1).unwrap();
        assert_eq!(s.overlap, Some(1.0));
        assert_eq!(s.baseline, 0.1);

        let disjoint: Vec<bool> = (0..20).map(|k| k >= 10).collect();
        assert_eq!(
            region_overlap(&disjoint, &nf, 0.1).unwrap().overlap,
            Some(0.0)
        );

        let none = vec![false; 20];
        assert_eq!(region_overlap(&none, &nf, 0.1).unwrap().overlap, None);
        assert!(region_overlap(&none[..3], &nf, 0.1).is_err());
    }

    #[test]
    fn low_gm_fraction() {
        let r = synthetic(vec![Some(2.0), Some(0.1), Some(2.0), Some(2.0)], 2);
        assert_eq!(entangled_fraction_below_gm(&r, 0.0), Some(0.5));
        assert_eq!(entangled_fraction_below_gm(&r, 1.0), Some(0.75));
        assert_eq!(entangled_fraction_below_gm(&r, -1.0), None);
    }
}
