//! Quantized two-oscillator model of a cryogenic HEMT low-noise amplifier.
//!
//! The pipeline runs circuit parameters through canonical quantization
//! ([`circuit`]), solves for steady-state photon moments ([`spectral`]),
//! turns those into an entanglement metric and a noise figure ([`metrics`]),
//! and maps both over a (frequency, transconductance) grid ([`sweep`]).
//! [`config`] and [`output`] handle the TOML input and the result files.

// Negated comparisons are the NaN-rejecting guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod config;
pub mod constants;
pub mod error;
pub mod metrics;
pub mod output;
pub mod spectral;
pub mod sweep;

pub use circuit::{quantize, CircuitParams, QuantizedModel};
pub use error::{Error, Result};
pub use metrics::{entanglement_metric, noise_figure, EntanglementReport, NoiseReport};
pub use spectral::{MomentSet, ThermalReference};
pub use sweep::{run_sweep, Axis, Backend, SweepConfig, SweepResult};
