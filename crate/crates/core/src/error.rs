use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {constraint}")]
    InvalidParameter {
        field: &'static str,
        constraint: &'static str,
    },

    #[error("degenerate circuit: capacitance matrix is not positive definite (eigenvalues {eigenvalues:?} F)")]
    DegenerateCircuit { eigenvalues: [f64; 2] },

    #[error("Heisenberg coefficients do not fit the coupled-oscillator template (relative residual {residual:e})")]
    TemplateMismatch { residual: f64 },

    #[error("moment-closure system is singular at omega = {omega:e} rad/s, g_m = {g_m:e} A/V (condition {condition:e})")]
    ClosureSingular {
        omega: f64,
        g_m: f64,
        condition: f64,
    },

    #[error("spectral response matrix is singular at omega = {omega:e} rad/s, g_m = {g_m:e} A/V (condition {condition:e})")]
    SpectralSingular {
        omega: f64,
        g_m: f64,
        condition: f64,
    },

    #[error("drift matrix is not Hurwitz; eigenvalues (re, im) = {eigenvalues:?}")]
    UnstableModel { eigenvalues: Vec<(f64, f64)> },

    #[error("entanglement metric undefined: n1ph * n2ph = 0 with |n12ph| = {n12_abs:e}")]
    UndefinedMetric { n12_abs: f64 },

    #[error("negative photon number (n1ph = {n1ph:e}, n2ph = {n2ph:e})")]
    UnphysicalMoments { n1ph: f64, n2ph: f64 },

    #[error("noise figure is infinite at omega = {omega:e} rad/s (no forward gain or input null)")]
    InfiniteNoiseFigure { omega: f64 },

    #[error("lossless resonance at omega = {omega:e} rad/s: nodal response has a pole")]
    ResonantPole { omega: f64 },

    #[error("region statistics undefined: every sweep cell failed")]
    EmptyRegion,

    #[error("invalid sweep configuration: {}", fields.join("; "))]
    InvalidSweep { fields: Vec<String> },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("unknown config key `{key}` at line {line}")]
    UnknownKey { key: String, line: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Validation-type failures (bad inputs rather than numerics or I/O).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::InvalidSweep { .. }
                | Error::ConfigParse { .. }
                | Error::UnknownKey { .. }
        )
    }
}
