//! Fourier-domain Langevin solver.
//!
//! Two backends compute the per-frequency second moments:
//!
//! * [`solve_moments_closure`] solves the three moment equations for
//!   `<a1+ a1>`, `<a2+ a2>`, `<a1 a2>` that follow from squaring the
//!   frequency-domain equations and keeping only the listed correlators.
//! * [`solve_moments_covariance`] inverts the full 4x4 response over
//!   (a1, a1+, a2, a2+) and propagates the input-noise correlators exactly.
//!
//! [`lyapunov_steady_state`] solves the time-domain steady state and is used
//! as an oracle for the frequency-integrated covariance backend.
//!
//! Convention: fields are probed as `e^{-j w t}`, so the a1 denominator is
//! `a01 = j (w1 - w) + k1/2` and resonances sit at positive `w`.
//!
//! Normalization: the input coupling is `sqrt(2 k)` with damping `k/2`, so
//! `[a, a+] = 1` is preserved only for half-normalized white input noise.
//! Per-frequency moments here use `<a_in+ a_in> = n` as the source term, and
//! the equal-time occupation is `integral n_ph(w) dw / 4 pi`.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{QuantizedModel, A1, A1_DAG, A2, A2_DAG};
use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};

/// Systems whose condition-number estimate exceeds this are singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Bose-Einstein occupation `1 / (exp(hbar w / k_B T) - 1)`; zero at T = 0.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// Frequency at which the input baths are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThermalReference {
    /// Each bath at its own oscillator frequency.
    #[default]
    Mode,
    /// Both baths at the probe frequency.
    Probe,
}

impl std::fmt::Display for ThermalReference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ThermalReference::Mode => "mode",
            ThermalReference::Probe => "probe",
        })
    }
}

pub fn input_occupations(
    model: &QuantizedModel,
    omega: f64,
    temperature: f64,
    reference: ThermalReference,
) -> (f64, f64) {
    match reference {
        ThermalReference::Mode => (
            thermal_occupation(model.omega1, temperature),
            thermal_occupation(model.omega2, temperature),
        ),
        ThermalReference::Probe => {
            let n = thermal_occupation(omega.abs(), temperature);
            (n, n)
        }
    }
}

/// Per-frequency coefficients of the two coupled equations
///
/// ```text
/// a01 a1 = a02 a2 + a03 a2+ + a04 a1+ + sqrt(2 k1) a1_in
/// b01 a2 = b02 a1 + b03 a1+ + b04 a2+ + sqrt(2 k2) a2_in
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSystem {
    /// Probe angular frequency (rad/s)
    pub omega: f64,
    pub a01: Complex64,
    pub a02: Complex64,
    pub a03: Complex64,
    pub a04: Complex64,
    pub b01: Complex64,
    pub b02: Complex64,
    pub b03: Complex64,
    pub b04: Complex64,
    /// Transconductance of the underlying model, for error reporting (A/V)
    pub g_m: f64,
}

impl SpectralSystem {
    pub fn kappa1(&self) -> f64 {
        2.0 * self.a01.re
    }

    pub fn kappa2(&self) -> f64 {
        2.0 * self.b01.re
    }

    /// Denominators at the mirror frequency `-w`, which govern the a+ rows.
    fn mirrored_denominators(&self) -> (Complex64, Complex64) {
        let shift = Complex64::new(0.0, 2.0 * self.omega);
        (self.a01 + shift, self.b01 + shift)
    }

    /// `(-j w I - D)` over (a1, a1+, a2, a2+).
    pub fn response_system(&self) -> Matrix4<Complex64> {
        let (a01m, b01m) = self.mirrored_denominators();
        #[rustfmt::skip]
        let s = Matrix4::new(
            self.a01,          -self.a04,         -self.a02,         -self.a03,
            -self.a04.conj(),  a01m.conj(),       -self.a03.conj(),  -self.a02.conj(),
            -self.b02,         -self.b03,         self.b01,          -self.b04,
            -self.b03.conj(),  -self.b02.conj(),  -self.b04.conj(),  b01m.conj(),
        );
        s
    }
}

pub fn build_spectral_system(model: &QuantizedModel, omega: f64) -> SpectralSystem {
    let j = Complex64::i();
    SpectralSystem {
        omega,
        a01: j * (model.omega1 - omega) + model.kappa1 / 2.0,
        a02: model.omega2 * (model.a1 + model.a2),
        a03: model.omega2 * (model.a2 - model.a1),
        a04: 2.0 * model.omega1 * model.a3,
        b01: j * (model.omega2 - omega) + model.kappa2 / 2.0,
        b02: model.omega1 * (model.b1 + model.b2),
        b03: model.omega1 * (model.b2 - model.b1),
        b04: 2.0 * model.omega2 * model.b3,
        g_m: model.g_m,
    }
}

/// Photon numbers and phase-sensitive cross-correlation at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub omega: f64,
    pub g_m: f64,
    /// `<a1+ a1>` per unit bandwidth
    pub n1ph: f64,
    /// `<a2+ a2>` per unit bandwidth
    pub n2ph: f64,
    /// `<a1 a2>` per unit bandwidth
    pub n12ph: Complex64,
    pub n1bar: f64,
    pub n2bar: f64,
}

// Non-finite entries are reported as infinitely ill-conditioned; the SVD
// iteration does not terminate on them.
fn condition_number(m: &Matrix4<Complex64>) -> f64 {
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return f64::INFINITY;
    }
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn real_condition_number(m: &Matrix4<f64>) -> f64 {
    if !m.iter().all(|x| x.is_finite()) {
        return f64::INFINITY;
    }
    let sv = m.singular_values();
    let (max, min) = (sv.max(), sv.min());
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Moment closure with the single phase-sensitive cross term of the
/// `<a1+ a1>` and `<a2+ a2>` equations symmetrized to `2 Re(.)`, so both
/// photon numbers stay real.
///
/// All moments are densities per unit bandwidth, so the commutator enters
/// as the free-mode spectral density rather than a bare 1:
/// `<a_i a_i+> = <a_i+ a_i> + 2 k_i / |a0i|^2`.
pub fn solve_moments_closure(sys: &SpectralSystem, n1bar: f64, n2bar: f64) -> Result<MomentSet> {
    let k1 = sys.kappa1();
    let k2 = sys.kappa2();
    let na = sys.a01.norm_sqr();
    let nb = sys.b01.norm_sqr();

    let (al1, be1, ga1) = (
        sys.a02.norm_sqr() / na,
        sys.a03.norm_sqr() / na,
        sys.a04.norm_sqr() / na,
    );
    let c1 = sys.a02 * sys.a04.conj() / na;
    let s1 = 2.0 * k1 * n1bar / na;
    let v1 = 2.0 * k1 / na;

    let (al2, be2, ga2) = (
        sys.b02.norm_sqr() / nb,
        sys.b03.norm_sqr() / nb,
        sys.b04.norm_sqr() / nb,
    );
    let c2 = sys.b02 * sys.b04.conj() / nb;
    let s2 = 2.0 * k2 * n2bar / nb;
    let v2 = 2.0 * k2 / nb;

    let denom = sys.a01 * sys.b01;
    let p = sys.a02 * sys.b02 / denom;
    let q = sys.a04 * sys.b02 / denom;
    let r = sys.a02 * sys.b04 / denom;

    // unknowns (n1, n2, Re n12, Im n12)
    #[rustfmt::skip]
    let m = Matrix4::new(
        1.0 - ga1,     -(al1 + be1),  -2.0 * c1.re,  2.0 * c1.im,
        -(al2 + be2),  1.0 - ga2,     -2.0 * c2.re,  2.0 * c2.im,
        -q.re,         -r.re,         1.0 - p.re,    p.im,
        -q.im,         -r.im,         -p.im,         1.0 - p.re,
    );
    let rhs = Vector4::new(
        be1 * v2 + ga1 * v1 + s1,
        be2 * v1 + ga2 * v2 + s2,
        r.re * v2,
        r.im * v2,
    );

    let condition = real_condition_number(&m);
    let singular = Error::ClosureSingular {
        omega: sys.omega,
        g_m: sys.g_m,
        condition,
    };
    if !(condition <= SINGULAR_CONDITION) {
        return Err(singular);
    }
    let u = m.lu().solve(&rhs).ok_or(singular)?;

    Ok(MomentSet {
        omega: sys.omega,
        g_m: sys.g_m,
        n1ph: u[0],
        n2ph: u[1],
        n12ph: Complex64::new(u[2], u[3]),
        n1bar,
        n2bar,
    })
}

/// Linear map from the input-noise operators to the mode operators,
/// `X(w) = F(w) xi(w)` with `F = S^-1 Gamma`.
pub fn response_matrix(sys: &SpectralSystem) -> Result<Matrix4<Complex64>> {
    let s = sys.response_system();
    let condition = condition_number(&s);
    let singular = Error::SpectralSingular {
        omega: sys.omega,
        g_m: sys.g_m,
        condition,
    };
    if !(condition <= SINGULAR_CONDITION) {
        return Err(singular);
    }
    let inv = s.try_inverse().ok_or(singular)?;
    let g1 = (2.0 * sys.kappa1()).sqrt();
    let g2 = (2.0 * sys.kappa2()).sqrt();
    let gamma = Vector4::new(g1, g1, g2, g2).map(Complex64::from);
    Ok(Matrix4::from_fn(|r, c| inv[(r, c)] * gamma[c]))
}

/// Hermitian positive semidefinite moment spectrum `Phi[x][y] = <x+ y>(w)`
/// over (a1, a1+, a2, a2+), where the adjoint of an a+ entry is its a.
///
/// `Phi = conj(F) W F^T` with `W = diag(n1, n1 + 1, n2, n2 + 1)`.
pub fn spectral_moment_matrix(
    sys: &SpectralSystem,
    n1bar: f64,
    n2bar: f64,
) -> Result<Matrix4<Complex64>> {
    let f = response_matrix(sys)?;
    let w = [n1bar, n1bar + 1.0, n2bar, n2bar + 1.0];
    Ok(Matrix4::from_fn(|r, c| {
        (0..4).fold(Complex64::from(0.0), |acc, m| {
            acc + f[(r, m)].conj() * f[(c, m)] * w[m]
        })
    }))
}

/// Exact per-frequency moments from the 4x4 response.
pub fn solve_moments_covariance(sys: &SpectralSystem, n1bar: f64, n2bar: f64) -> Result<MomentSet> {
    let phi = spectral_moment_matrix(sys, n1bar, n2bar)?;
    Ok(moments_from_spectrum(sys, &phi, n1bar, n2bar))
}

pub(crate) fn moments_from_spectrum(
    sys: &SpectralSystem,
    phi: &Matrix4<Complex64>,
    n1bar: f64,
    n2bar: f64,
) -> MomentSet {
    MomentSet {
        omega: sys.omega,
        g_m: sys.g_m,
        n1ph: phi[(A1, A1)].re,
        n2ph: phi[(A2, A2)].re,
        // <a2 a1> ordering; equal to <a1 a2> at equal times
        n12ph: phi[(A2_DAG, A1)],
        n1bar,
        n2bar,
    }
}

/// Coherent amplitudes `(<a1>, <a2>)` driven by `E1, E2` at the probe frequency.
pub fn coherent_response(model: &QuantizedModel, omega: f64) -> Result<[Complex64; 2]> {
    let sys = build_spectral_system(model, omega);
    let s = sys.response_system();
    let condition = condition_number(&s);
    if !(condition <= SINGULAR_CONDITION) {
        return Err(Error::SpectralSingular {
            omega,
            g_m: model.g_m,
            condition,
        });
    }
    let drive = Vector4::new(model.e1, model.e1.conj(), model.e2, model.e2.conj());
    let x = s.lu().solve(&drive).ok_or(Error::SpectralSingular {
        omega,
        g_m: model.g_m,
        condition,
    })?;
    Ok([x[A1], x[A2]])
}

/// Steady state of `d C/dt = D C + C D^T + Q` with `C_ij = <alpha_i alpha_j>`
/// over (a1, a1+, a2, a2+).
///
/// The diffusion comes from `sqrt(2 k) a_in` with half-normalized white
/// correlators, `<a_in a_in+> = (n + 1)/2`, `<a_in+ a_in> = n/2`.
pub fn lyapunov_steady_state(
    model: &QuantizedModel,
    n1bar: f64,
    n2bar: f64,
) -> Result<Matrix4<Complex64>> {
    response_poles(model)?;
    let drift = model.drift();

    let mut q = Matrix4::<Complex64>::zeros();
    q[(A1, A1_DAG)] = (model.kappa1 * (n1bar + 1.0)).into();
    q[(A1_DAG, A1)] = (model.kappa1 * n1bar).into();
    q[(A2, A2_DAG)] = (model.kappa2 * (n2bar + 1.0)).into();
    q[(A2_DAG, A2)] = (model.kappa2 * n2bar).into();

    // column-major vec: vec(D C) = (I (x) D) vec C, vec(C D^T) = (D (x) I) vec C
    let d = DMatrix::from_fn(4, 4, |r, c| drift[(r, c)]);
    let eye = DMatrix::<Complex64>::identity(4, 4);
    let op = eye.kronecker(&d) + d.kronecker(&eye);
    let rhs = DVector::from_iterator(16, q.iter().map(|z| -z));
    let sol = op.lu().solve(&rhs).ok_or(Error::UnstableModel {
        eigenvalues: Vec::new(),
    })?;
    Ok(Matrix4::from_iterator(sol.iter().copied()))
}

/// `(<a1+ a1>, <a2+ a2>)` from a steady-state covariance.
pub fn steady_occupations(cov: &Matrix4<Complex64>) -> (f64, f64) {
    (cov[(A1_DAG, A1)].re, cov[(A2_DAG, A2)].re)
}

/// Resonances of the response: `(centre, linewidth)` for every drift
/// eigenvalue, with centre `-Im(lambda)` and linewidth `-2 Re(lambda)`.
pub fn response_poles(model: &QuantizedModel) -> Result<Vec<(f64, f64)>> {
    let eigenvalues = model
        .drift()
        .eigenvalues()
        .map(|e| e.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>())
        .unwrap_or_default();
    if eigenvalues.len() != 4 || eigenvalues.iter().any(|(re, _)| !(*re < 0.0)) {
        return Err(Error::UnstableModel { eigenvalues });
    }
    Ok(eigenvalues
        .iter()
        .map(|&(re, im)| (-im, -2.0 * re))
        .collect())
}

/// Union of `centre +/- half_width * linewidth` over all poles, merged and sorted.
pub fn quadrature_windows(poles: &[(f64, f64)], half_width: f64) -> Vec<(f64, f64)> {
    let mut spans: Vec<(f64, f64)> = poles
        .iter()
        .map(|&(c, k)| (c - half_width * k, c + half_width * k))
        .collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
    for (lo, hi) in spans {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Equal-time occupations from the covariance backend: composite Simpson
/// quadrature of `n_ph(w) dw / 4 pi` over the windows of
/// [`quadrature_windows`]. Coupling puts weight at every normal-mode
/// frequency, including negative ones, so each occupation is integrated over
/// all windows. `intervals` is the Simpson interval count per linewidth.
pub fn integrated_occupations(
    model: &QuantizedModel,
    n1bar: f64,
    n2bar: f64,
    half_width_kappas: f64,
    intervals_per_linewidth: usize,
) -> Result<(f64, f64)> {
    let poles = response_poles(model)?;
    let min_width = poles.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let (mut n1, mut n2) = (0.0, 0.0);
    for (lo, hi) in quadrature_windows(&poles, half_width_kappas) {
        let steps = ((hi - lo) / min_width * intervals_per_linewidth as f64).ceil() as usize;
        let steps = (steps.max(2) + 1) & !1;
        let h = (hi - lo) / steps as f64;
        for k in 0..=steps {
            let w = lo + h * k as f64;
            let m = solve_moments_covariance(&build_spectral_system(model, w), n1bar, n2bar)?;
            let weight = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            n1 += weight * h / 3.0 * m.n1ph;
            n2 += weight * h / 3.0 * m.n2ph;
        }
    }
    let norm = 4.0 * std::f64::consts::PI;
    Ok((n1 / norm, n2 / norm))
}
