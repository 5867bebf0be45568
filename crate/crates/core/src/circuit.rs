//! Circuit quantization for the two-oscillator LNA model.
//!
//! Node 1 is the gate flux, node 2 the drain flux. The pipeline is
//!
//! 1. capacitance matrix from the kinetic part of the Lagrangian,
//! 2. Legendre transform to a quadratic Hamiltonian in (Q, phi),
//! 3. bosonization of the diagonal oscillators (frequency, impedance),
//! 4. Heisenberg equations of motion for (a1, a1+, a2, a2+), matched onto
//!    the coupled-oscillator template to extract the coupling coefficients.
//!
//! Every coefficient is computed numerically from the component values;
//! nothing is tabulated.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Error, Result};

/// Lumped component values, transistor coefficients, drive and temperature.
///
/// All values are SI. [`Default`] gives the reference ATF-class HEMT
/// operating point used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Gate-source capacitance (F)
    pub c_gs: f64,
    /// Gate-drain (feedback) capacitance (F)
    pub c_gd: f64,
    /// Drain-source capacitance (F)
    pub c_ds: f64,
    /// Input coupling capacitance (F)
    pub c_in: f64,
    /// Gate inductance (H)
    pub l_g: f64,
    /// Drain inductance (H)
    pub l_d: f64,
    /// Gate resistance (Ohm)
    pub r_g: f64,
    /// Source resistance (Ohm)
    pub r_s: f64,
    /// Effective series loss of the drain inductor (Ohm)
    pub r_d: f64,
    /// Intrinsic transconductance (A/V)
    pub g_m: f64,
    /// Second-order transconductance coefficient
    pub g_m2: f64,
    /// Third-order transconductance coefficient (A/V^3)
    pub g_m3: f64,
    /// RF drive amplitude (V)
    pub v_rf: f64,
    /// Empirical drain-noise constant
    pub gamma: f64,
    /// Physical temperature (K)
    pub t_c: f64,
    /// Decay rate of the gate oscillator (rad/s); `None` uses r_g / l_g
    pub kappa1_override: Option<f64>,
    /// Decay rate of the drain oscillator (rad/s); `None` uses r_d / l_d
    pub kappa2_override: Option<f64>,
    /// Linearization amplitude for the nonlinear transconductance (V); `None` uses v_rf
    pub v_op: Option<f64>,
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self {
            c_gs: 2.0e-12,
            c_gd: 0.04e-12,
            c_ds: 0.08e-12,
            c_in: 0.1e-12,
            l_g: 0.25e-9,
            l_d: 1.0e-9,
            r_g: 1.2,
            r_s: 50.0,
            r_d: 1.2,
            g_m: 20.0e-3,
            g_m2: 0.0,
            g_m3: 600.0e-3,
            v_rf: 1.0e-3,
            gamma: 2.0 / 3.0,
            t_c: 4.0,
            kappa1_override: None,
            kappa2_override: None,
            v_op: None,
        }
    }
}

impl CircuitParams {
    /// Default values with every coupling path removed: no feedback or input
    /// capacitor and a linear, zero-transconductance transistor.
    pub fn decoupled() -> Self {
        Self {
            c_gd: 0.0,
            c_in: 0.0,
            g_m: 0.0,
            g_m2: 0.0,
            g_m3: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    field,
                    constraint: "must be finite and > 0",
                })
            }
        }
        fn non_negative(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    field,
                    constraint: "must be finite and >= 0",
                })
            }
        }
        fn finite(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    field,
                    constraint: "must be finite",
                })
            }
        }

        positive("c_gs", self.c_gs)?;
        // The two coupling capacitors may be switched off entirely.
        non_negative("c_gd", self.c_gd)?;
        positive("c_ds", self.c_ds)?;
        non_negative("c_in", self.c_in)?;
        positive("l_g", self.l_g)?;
        positive("l_d", self.l_d)?;
        positive("r_g", self.r_g)?;
        positive("r_s", self.r_s)?;
        positive("r_d", self.r_d)?;
        non_negative("g_m", self.g_m)?;
        finite("g_m2", self.g_m2)?;
        finite("g_m3", self.g_m3)?;
        non_negative("v_rf", self.v_rf)?;
        positive("gamma", self.gamma)?;
        positive("t_c", self.t_c)?;
        if let Some(k) = self.kappa1_override {
            positive("kappa1", k)?;
        }
        if let Some(k) = self.kappa2_override {
            positive("kappa2", k)?;
        }
        if let Some(v) = self.v_op {
            non_negative("v_op", v)?;
        }
        Ok(())
    }

    pub fn operating_amplitude(&self) -> f64 {
        self.v_op.unwrap_or(self.v_rf)
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1_override.unwrap_or(self.r_g / self.l_g)
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2_override.unwrap_or(self.r_d / self.l_d)
    }
}

/// Kinetic-energy matrix of the node fluxes (F).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitanceMatrix {
    pub c: Matrix2<f64>,
}

impl CapacitanceMatrix {
    pub fn inverse(&self) -> Matrix2<f64> {
        // positive definite by construction
        self.c
            .try_inverse()
            .expect("capacitance matrix checked positive definite")
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let e = SymmetricEigen::new(self.c).eigenvalues;
        let (lo, hi) = if e[0] <= e[1] {
            (e[0], e[1])
        } else {
            (e[1], e[0])
        };
        [lo, hi]
    }
}

pub fn build_capacitance_matrix(params: &CircuitParams) -> Result<CapacitanceMatrix> {
    let c = Matrix2::new(
        params.c_gs + params.c_gd + params.c_in,
        -params.c_gd,
        -params.c_gd,
        params.c_ds + params.c_gd,
    );
    let cmat = CapacitanceMatrix { c };
    let eigenvalues = cmat.eigenvalues();
    // Relative floor keeps a numerically singular matrix from passing.
    let scale = eigenvalues[1].abs().max(f64::MIN_POSITIVE);
    if !(eigenvalues[0] > 1e-12 * scale) || !eigenvalues[0].is_finite() {
        return Err(Error::DegenerateCircuit { eigenvalues });
    }
    Ok(cmat)
}

/// Effective nonlinear transconductance `g_m2 + 2 g_m3 v_op` (A/V).
///
/// `g_m3 v_op` is the cubic term linearized about the operating swing;
/// `g_m2` is taken per volt of that swing so the sum carries units of A/V.
pub fn effective_nonlinear_coefficient(params: &CircuitParams) -> f64 {
    params.g_m2 + 2.0 * params.g_m3 * params.operating_amplitude()
}

/// Expanded quadratic Hamiltonian
///
/// ```text
/// H = sum_ij h_qq[i][j] Q_i Q_j + sum_ij h_pp[i][j] phi_i phi_j
///   + sum_ij h_qp[i][j] Q_i phi_j + d_q . Q + d_p . phi
/// ```
///
/// `h_qq` and `h_pp` are symmetric, so an off-diagonal pair appears twice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianCoefficients {
    /// Q_i Q_j coefficients (1/F)
    pub h_qq: Matrix2<f64>,
    /// phi_i phi_j coefficients (1/H), including the transconductance stiffening
    pub h_pp: Matrix2<f64>,
    /// Q_i phi_j cross terms (1/s)
    pub h_qp: Matrix2<f64>,
    /// Linear drive on Q_i (V)
    pub d_q: Vector2<f64>,
    /// Linear drive on phi_i (A)
    pub d_p: Vector2<f64>,
    /// Effective nonlinear coefficient g_NL (A/V)
    pub nl_scale: f64,
}

/// Legendre transform of
///
/// ```text
/// L = 1/2 phi'^T C phi' - phi'^T b(phi) - U(phi)
/// ```
///
/// with `U = phi1^2 / 2 l_g + phi2^2 / 2 l_d`. The velocity-linear term
/// carries the drain current source `-g phi2 phi1'` (g = g_m + g_NL) and the
/// input drive `-c_in v_rf phi1'`. The current-source term is written in the
/// antisymmetric gauge `b = (g phi2 / 2 + c_in v_rf, -g phi1 / 2)`, which
/// differs from `-g phi2 phi1'` by a total time derivative and puts the
/// g^2 stiffening on both inductors.
///
/// `Q = C phi' - b` and `H = 1/2 (Q + b)^T C^-1 (Q + b) + U`.
pub fn legendre_transform(
    params: &CircuitParams,
    cmat: &CapacitanceMatrix,
) -> Result<HamiltonianCoefficients> {
    let k = cmat.c.try_inverse().ok_or(Error::DegenerateCircuit {
        eigenvalues: cmat.eigenvalues(),
    })?;
    let nl_scale = effective_nonlinear_coefficient(params);
    let g = params.g_m + nl_scale;

    // b(phi) = B phi + b0
    let b = Matrix2::new(0.0, 0.5 * g, -0.5 * g, 0.0);
    let b0 = Vector2::new(params.c_in * params.v_rf, 0.0);
    let inductive = Matrix2::new(1.0 / params.l_g, 0.0, 0.0, 1.0 / params.l_d);

    let h_qq = 0.5 * k;
    let h_qp = k * b;
    let mut h_pp = 0.5 * (b.transpose() * k * b + inductive);
    // exact symmetry; the product above can differ in the last ulp
    let off = 0.5 * (h_pp[(0, 1)] + h_pp[(1, 0)]);
    h_pp[(0, 1)] = off;
    h_pp[(1, 0)] = off;
    let d_q = k * b0;
    let d_p = b.transpose() * k * b0;

    Ok(HamiltonianCoefficients {
        h_qq,
        h_pp,
        h_qp,
        d_q,
        d_p,
        nl_scale,
    })
}

/// Bare frequency and impedance of each oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBasis {
    /// rad/s
    pub omega: [f64; 2],
    /// Ohm
    pub z: [f64; 2],
}

/// `omega_i = 2 sqrt(h_qq[i][i] h_pp[i][i])`, `z_i = sqrt(h_qq[i][i] / h_pp[i][i])`,
/// i.e. `1 / sqrt(L C)` and `sqrt(L / C)` for the effective L and C.
pub fn bosonize(coeffs: &HamiltonianCoefficients) -> Result<ModeBasis> {
    let mut omega = [0.0; 2];
    let mut z = [0.0; 2];
    for i in 0..2 {
        let q = coeffs.h_qq[(i, i)];
        let p = coeffs.h_pp[(i, i)];
        if !(q > 0.0 && p > 0.0) {
            return Err(Error::InvalidParameter {
                field: if i == 0 {
                    "h_qq/h_pp[0][0]"
                } else {
                    "h_qq/h_pp[1][1]"
                },
                constraint: "diagonal Hamiltonian coefficients must be > 0",
            });
        }
        omega[i] = 2.0 * (q * p).sqrt();
        z[i] = (q / p).sqrt();
    }
    Ok(ModeBasis { omega, z })
}

/// Coupled-oscillator Langevin model
///
/// ```text
/// a1' = -(j w1 + k1/2) a1 + w2 A1 (a2 - a2+) + w2 A2 (a2 + a2+) + w1 A3 (2 a1+) + E1 + sqrt(2 k1) a1_in
/// a2' = -(j w2 + k2/2) a2 + w1 B1 (a1 - a1+) + w1 B2 (a1 + a1+) + w2 B3 (2 a2+) + E2 + sqrt(2 k2) a2_in
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantizedModel {
    pub omega1: f64,
    pub omega2: f64,
    pub z1: f64,
    pub z2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
    pub b3: Complex64,
    /// Coherent drive on a1 (1/s)
    pub e1: Complex64,
    /// Coherent drive on a2 (1/s)
    pub e2: Complex64,
    /// Transconductance the model was built at (A/V); carried for diagnostics.
    pub g_m: f64,
}

/// Operator ordering used by every 4x4 object in the crate.
pub const A1: usize = 0;
pub const A1_DAG: usize = 1;
pub const A2: usize = 2;
pub const A2_DAG: usize = 3;

impl QuantizedModel {
    /// Drift matrix over (a1, a1+, a2, a2+) including damping.
    pub fn drift(&self) -> Matrix4<Complex64> {
        let i = Complex64::i();
        let w1 = Complex64::from(self.omega1);
        let w2 = Complex64::from(self.omega2);
        let d11 = -(i * self.omega1 + self.kappa1 / 2.0);
        let d22 = -(i * self.omega2 + self.kappa2 / 2.0);
        let to_a2 = w2 * (self.a1 + self.a2);
        let to_a2_dag = w2 * (self.a2 - self.a1);
        let sq1 = 2.0 * w1 * self.a3;
        let to_a1 = w1 * (self.b1 + self.b2);
        let to_a1_dag = w1 * (self.b2 - self.b1);
        let sq2 = 2.0 * w2 * self.b3;

        #[rustfmt::skip]
        let d = Matrix4::new(
            d11,               sq1,              to_a2,             to_a2_dag,
            sq1.conj(),        d11.conj(),       to_a2_dag.conj(),  to_a2.conj(),
            to_a1,             to_a1_dag,        d22,               sq2,
            to_a1_dag.conj(),  to_a1.conj(),     sq2.conj(),        d22.conj(),
        );
        d
    }

    /// Same model with every coupling coefficient multiplied by `eps`.
    pub fn with_couplings_scaled(&self, eps: f64) -> Self {
        Self {
            a1: self.a1 * eps,
            a2: self.a2 * eps,
            a3: self.a3 * eps,
            b1: self.b1 * eps,
            b2: self.b2 * eps,
            b3: self.b3 * eps,
            ..*self
        }
    }

    /// Exchange the two oscillators.
    pub fn swapped(&self) -> Self {
        Self {
            omega1: self.omega2,
            omega2: self.omega1,
            z1: self.z2,
            z2: self.z1,
            kappa1: self.kappa2,
            kappa2: self.kappa1,
            a1: self.b1,
            a2: self.b2,
            a3: self.b3,
            b1: self.a1,
            b2: self.a2,
            b3: self.a3,
            e1: self.e2,
            e2: self.e1,
            g_m: self.g_m,
        }
    }
}

/// Relative tolerance on the template's diagonal match.
const TEMPLATE_TOLERANCE: f64 = 1e-9;
/// Magnitude below which a coupling coefficient is treated as zero.
pub const COUPLING_FLOOR: f64 = 1e-13;

/// Lossless Heisenberg drift and drive for a quadratic Hamiltonian in the
/// given mode basis: `d alpha/dt = D alpha + e` with alpha = (a1, a1+, a2, a2+).
///
/// `[alpha_i, x^T M x] = 2 (c M x)_i` where `c_ik = [alpha_i, x_k]` is a
/// c-number, so the commutator is evaluated exactly as a matrix product.
pub fn hamiltonian_drift(
    coeffs: &HamiltonianCoefficients,
    modes: &ModeBasis,
) -> (Matrix4<Complex64>, Vector4<Complex64>) {
    let i = Complex64::i();
    let zero = Complex64::from(0.0);
    let sq = |z: f64| (HBAR / (2.0 * z)).sqrt();
    let sp = |z: f64| (HBAR * z / 2.0).sqrt();
    let (sq1, sq2) = (sq(modes.z[0]), sq(modes.z[1]));
    let (sp1, sp2) = (sp(modes.z[0]), sp(modes.z[1]));

    // x = (Q1, Q2, phi1, phi2) = T alpha
    #[rustfmt::skip]
    let t = Matrix4::new(
        -i * sq1,          i * sq1,          zero,               zero,
        zero,              zero,             -i * sq2,           i * sq2,
        sp1.into(),        sp1.into(),       zero,               zero,
        zero,              zero,             sp2.into(),         sp2.into(),
    );
    // c_ik = [alpha_i, x_k]
    #[rustfmt::skip]
    let c = Matrix4::new(
        i * sq1,   zero,      sp1.into(),     zero,
        i * sq1,   zero,      (-sp1).into(),  zero,
        zero,      i * sq2,   zero,           sp2.into(),
        zero,      i * sq2,   zero,           (-sp2).into(),
    );

    let mut m = Matrix4::<f64>::zeros();
    for r in 0..2 {
        for s in 0..2 {
            m[(r, s)] = coeffs.h_qq[(r, s)];
            m[(r + 2, s + 2)] = coeffs.h_pp[(r, s)];
            m[(r, s + 2)] = 0.5 * coeffs.h_qp[(r, s)];
            m[(s + 2, r)] = 0.5 * coeffs.h_qp[(r, s)];
        }
    }
    let m = m.map(Complex64::from);
    let d = Vector4::new(coeffs.d_q[0], coeffs.d_q[1], coeffs.d_p[0], coeffs.d_p[1])
        .map(Complex64::from);

    let prefactor = -i / HBAR;
    let drift = (c * m * t) * (prefactor * 2.0);
    let drive = (c * d) * prefactor;
    (drift, drive)
}

/// Match the Heisenberg equations onto the coupled-oscillator template.
pub fn heisenberg_coefficients(
    params: &CircuitParams,
    coeffs: &HamiltonianCoefficients,
    modes: &ModeBasis,
) -> Result<QuantizedModel> {
    let (drift, drive) = hamiltonian_drift(coeffs, modes);
    let [w1, w2] = modes.omega;
    let i = Complex64::i();

    // Self-rotation must be exactly -j w_i, and the a+ rows must mirror the
    // a rows; anything else cannot be written in the template.
    let mut residual: f64 = 0.0;
    residual = residual.max((drift[(A1, A1)] + i * w1).norm() / w1);
    residual = residual.max((drift[(A2, A2)] + i * w2).norm() / w2);
    let partner = [A1_DAG, A1, A2_DAG, A2];
    let scale = drift
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(w1.max(w2));
    for r in 0..4 {
        for s in 0..4 {
            let mirrored = drift[(partner[r], partner[s])].conj();
            residual = residual.max((drift[(r, s)] - mirrored).norm() / scale);
        }
    }
    if !(residual <= TEMPLATE_TOLERANCE) {
        return Err(Error::TemplateMismatch { residual });
    }

    let to_a2 = drift[(A1, A2)];
    let to_a2_dag = drift[(A1, A2_DAG)];
    let to_a1 = drift[(A2, A1)];
    let to_a1_dag = drift[(A2, A1_DAG)];
    // The coupling coefficients are dimensionless; parts below the rounding
    // floor of the drift assembly are cancellation noise, not coupling.
    let flush = |z: Complex64| {
        let part = |x: f64| if x.abs() < COUPLING_FLOOR { 0.0 } else { x };
        Complex64::new(part(z.re), part(z.im))
    };

    Ok(QuantizedModel {
        omega1: w1,
        omega2: w2,
        z1: modes.z[0],
        z2: modes.z[1],
        kappa1: params.kappa1(),
        kappa2: params.kappa2(),
        a1: flush((to_a2 - to_a2_dag) / (2.0 * w2)),
        a2: flush((to_a2 + to_a2_dag) / (2.0 * w2)),
        a3: flush(drift[(A1, A1_DAG)] / (2.0 * w1)),
        b1: flush((to_a1 - to_a1_dag) / (2.0 * w1)),
        b2: flush((to_a1 + to_a1_dag) / (2.0 * w1)),
        b3: flush(drift[(A2, A2_DAG)] / (2.0 * w2)),
        e1: drive[A1],
        e2: drive[A2],
        g_m: params.g_m,
    })
}

/// Every intermediate of the quantization pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantized {
    pub capacitance: CapacitanceMatrix,
    pub hamiltonian: HamiltonianCoefficients,
    pub modes: ModeBasis,
    pub model: QuantizedModel,
}

pub fn quantize(params: &CircuitParams) -> Result<Quantized> {
    params.validate()?;
    let capacitance = build_capacitance_matrix(params)?;
    let hamiltonian = legendre_transform(params, &capacitance)?;
    let modes = bosonize(&hamiltonian)?;
    let model = heisenberg_coefficients(params, &hamiltonian, &modes)?;
    Ok(Quantized {
        capacitance,
        hamiltonian,
        modes,
        model,
    })
}
