//! Physical constants (SI 2019, exact by definition).

/// Planck constant (J s)
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant `h / 2 pi` (J s)
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Boltzmann constant (J/K)
pub const K_B: f64 = 1.380_649e-23;
/// Standard noise reference temperature (K)
pub const T0: f64 = 290.0;
