//! Entanglement metric and small-signal noise figures.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::CircuitParams;
use crate::constants::T0;
use crate::error::{Error, Result};
use crate::spectral::MomentSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub epsilon_e: f64,
    pub entangled: bool,
    pub omega: f64,
    pub g_m: f64,
}

/// `|<a1 a2>| / sqrt(<a1+ a1> <a2+ a2>)`; entangled above 1.
pub fn entanglement_metric(m: &MomentSet) -> Result<EntanglementReport> {
    if m.n1ph < 0.0 || m.n2ph < 0.0 {
        return Err(Error::UnphysicalMoments {
            n1ph: m.n1ph,
            n2ph: m.n2ph,
        });
    }
    let cross = m.n12ph.norm();
    let product = m.n1ph * m.n2ph;
    let epsilon_e = if product > 0.0 {
        cross / product.sqrt()
    } else if cross == 0.0 {
        0.0
    } else {
        return Err(Error::UndefinedMetric { n12_abs: cross });
    };
    Ok(EntanglementReport {
        epsilon_e,
        entangled: epsilon_e > 1.0,
        omega: m.omega,
        g_m: m.g_m,
    })
}

/// Node voltages and drain current of the linear equivalent circuit.
///
/// Topology: a Thevenin source (`v_in`, `r_s`) feeds the gate node through
/// `c_in`; the gate node has `c_gs` and the `l_g + r_g` branch to ground and
/// `c_gd` to the drain node; the drain node has `c_ds`, the `l_d + r_d`
/// branch to ground and the dependent source `g_m v_gs`. The output current
/// is the current through the drain inductor branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalResponse {
    /// v_gs / v_in
    pub voltage_gain: Complex64,
    /// i_drain / v_in (A/V)
    pub transadmittance: Complex64,
}

pub fn nodal_response(params: &CircuitParams, omega: f64) -> Result<NodalResponse> {
    let jw = Complex64::new(0.0, omega);
    let one = Complex64::from(1.0);
    let y_in = jw * params.c_in / (one + jw * params.c_in * params.r_s);
    let y_g = one / (jw * params.l_g + params.r_g);
    let y_d = one / (jw * params.l_d + params.r_d);
    let y_gd = jw * params.c_gd;

    let y = Matrix2::new(
        y_in + jw * params.c_gs + y_g + y_gd,
        -y_gd,
        -y_gd + params.g_m,
        y_gd + jw * params.c_ds + y_d,
    );
    let det = y[(0, 0)] * y[(1, 1)] - y[(0, 1)] * y[(1, 0)];
    let scale = (y[(0, 0)] * y[(1, 1)]).norm() + (y[(0, 1)] * y[(1, 0)]).norm();
    if !(det.norm() > 1e-12 * scale) {
        return Err(Error::ResonantPole { omega });
    }
    let v = y
        .lu()
        .solve(&Vector2::new(y_in, Complex64::from(0.0)))
        .ok_or(Error::ResonantPole { omega })?;
    Ok(NodalResponse {
        voltage_gain: v[0],
        transadmittance: y_d * v[1],
    })
}

/// `G_m = |i_drain / v_in|^2` (A^2/V^2).
pub fn circuit_transconductance(params: &CircuitParams, omega: f64) -> Result<f64> {
    Ok(nodal_response(params, omega)?.transadmittance.norm_sqr())
}

/// Linear-magnitude counterpart of [`circuit_transconductance`] (A/V).
pub fn circuit_transconductance_magnitude(params: &CircuitParams, omega: f64) -> Result<f64> {
    Ok(nodal_response(params, omega)?.transadmittance.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseReport {
    /// A^2/V^2
    pub g_m_circuit: f64,
    pub noise_factor: f64,
    pub nf_db: f64,
    /// K
    pub t_noise: f64,
}

/// Noise factor from the two declared sources: source thermal noise `4kT r_s`
/// (with the gate resistance in series) and drain channel noise
/// `4kT gamma g_m`, referred to the input through `|v_gs / v_in|^2`:
///
/// ```text
/// F = 1 + r_g / r_s + gamma g_m / (r_s |G_v|^2 g_m^2)
/// ```
pub fn noise_figure(params: &CircuitParams, omega: f64) -> Result<NoiseReport> {
    let response = nodal_response(params, omega)?;
    let gv2 = response.voltage_gain.norm_sqr();
    if !(gv2 > 0.0) || !(params.g_m > 0.0) {
        return Err(Error::InfiniteNoiseFigure { omega });
    }
    let noise_factor = noise_factor(params.r_g, params.r_s, params.gamma, params.g_m, gv2);
    let nf_db = 10.0 * noise_factor.log10();
    Ok(NoiseReport {
        g_m_circuit: response.transadmittance.norm_sqr(),
        noise_factor,
        nf_db,
        t_noise: T0 * (noise_factor - 1.0),
    })
}

pub fn noise_factor(r_g: f64, r_s: f64, gamma: f64, g_m: f64, voltage_gain_sq: f64) -> f64 {
    1.0 + r_g / r_s + gamma * g_m / (r_s * voltage_gain_sq * g_m * g_m)
}

/// `T0 (10^(NF/10) - 1)` with T0 = 290 K.
pub fn noise_temperature(nf_db: f64) -> f64 {
    T0 * (10f64.powf(nf_db / 10.0) - 1.0)
}

pub fn noise_factor_to_db(f: f64) -> f64 {
    10.0 * f.log10()
}
