//! TOML run configuration. Every key carries its SI unit in the name.
//!
//! ```toml
//! [circuit]
//! c_gs_f = 2.0e-12
//! g_m_a_per_v = 0.02
//!
//! [sweep]
//! omega_min_rad_s = 5.0893800988154646e10
//! omega_points = 101
//! backend = "covariance"
//!
//! [output]
//! directory = "results"
//! formats = ["csv", "json"]
//! ```
//!
//! Omitted keys take the documented defaults; each one applied is logged
//! and returned in [`LoadedConfig::defaulted`].

use std::fmt::Debug;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitParams;
use crate::error::{Error, Result};
use crate::spectral::ThermalReference;
use crate::sweep::{Axis, Backend, SweepConfig};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Default probe band, 8.1 to 9.8 GHz (rad/s).
pub const DEFAULT_OMEGA_MIN: f64 = TWO_PI * 8.1e9;
pub const DEFAULT_OMEGA_MAX: f64 = TWO_PI * 9.8e9;
/// Default transconductance range (A/V).
pub const DEFAULT_GM_MIN: f64 = 0.0;
pub const DEFAULT_GM_MAX: f64 = 0.1;
pub const DEFAULT_POINTS: usize = 101;
pub const DEFAULT_OUTPUT_DIR: &str = "results";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub emit_plot_script: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from(DEFAULT_OUTPUT_DIR),
            formats: vec![OutputFormat::Csv, OutputFormat::Json],
            emit_plot_script: true,
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Sweep grid; `sweep.base` holds the circuit block.
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let base = CircuitParams::default();
        Self {
            sweep: SweepConfig {
                omega_axis: Axis::new(DEFAULT_OMEGA_MIN, DEFAULT_OMEGA_MAX, DEFAULT_POINTS),
                gm_axis: Axis::new(DEFAULT_GM_MIN, DEFAULT_GM_MAX, DEFAULT_POINTS),
                v_rf: base.v_rf,
                backend: Backend::default(),
                thermal_reference: ThermalReference::default(),
                base,
            },
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn circuit(&self) -> &CircuitParams {
        &self.sweep.base
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.base.validate()?;
        self.sweep.validate()?;
        if self.output.formats.is_empty() {
            return Err(Error::InvalidSweep {
                fields: vec!["output.formats must list at least one of csv, json".into()],
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    /// Dotted key paths that took their default value.
    pub defaulted: Vec<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    circuit: Option<RawCircuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    c_gs_f: Option<f64>,
    c_gd_f: Option<f64>,
    c_ds_f: Option<f64>,
    c_in_f: Option<f64>,
    l_g_h: Option<f64>,
    l_d_h: Option<f64>,
    r_g_ohm: Option<f64>,
    r_s_ohm: Option<f64>,
    r_d_ohm: Option<f64>,
    g_m_a_per_v: Option<f64>,
    g_m2_a_per_v2: Option<f64>,
    g_m3_a_per_v3: Option<f64>,
    v_rf_v: Option<f64>,
    gamma: Option<f64>,
    t_c_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa1_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa2_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_op_v: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    omega_min_rad_s: Option<f64>,
    omega_max_rad_s: Option<f64>,
    omega_points: Option<usize>,
    gm_min_a_per_v: Option<f64>,
    gm_max_a_per_v: Option<f64>,
    gm_points: Option<usize>,
    v_rf_v: Option<f64>,
    backend: Option<Backend>,
    thermal_reference: Option<ThermalReference>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<PathBuf>,
    formats: Option<Vec<OutputFormat>>,
    emit_plot_script: Option<bool>,
}

struct Defaults(Vec<String>);

impl Defaults {
    fn take<T: Debug>(&mut self, value: Option<T>, default: T, key: &str) -> T {
        value.unwrap_or_else(|| {
            log::info!("default applied: {key} = {default:?}");
            self.0.push(key.to_string());
            default
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn parse_error(text: &str, e: toml::de::Error) -> Error {
    let line = e.span().map_or(0, |s| line_of(text, s.start));
    let message = e.message().to_string();
    if let Some(rest) = message.strip_prefix("unknown field `") {
        if let Some(end) = rest.find('`') {
            return Error::UnknownKey {
                key: rest[..end].to_string(),
                line,
            };
        }
    }
    Error::ConfigParse { line, message }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| parse_error(text, e))?;
    let mut d = Defaults(Vec::new());
    let base = CircuitParams::default();
    let c = raw.circuit.unwrap_or_default();
    let circuit = CircuitParams {
        c_gs: d.take(c.c_gs_f, base.c_gs, "circuit.c_gs_f"),
        c_gd: d.take(c.c_gd_f, base.c_gd, "circuit.c_gd_f"),
        c_ds: d.take(c.c_ds_f, base.c_ds, "circuit.c_ds_f"),
        c_in: d.take(c.c_in_f, base.c_in, "circuit.c_in_f"),
        l_g: d.take(c.l_g_h, base.l_g, "circuit.l_g_h"),
        l_d: d.take(c.l_d_h, base.l_d, "circuit.l_d_h"),
        r_g: d.take(c.r_g_ohm, base.r_g, "circuit.r_g_ohm"),
        r_s: d.take(c.r_s_ohm, base.r_s, "circuit.r_s_ohm"),
        r_d: d.take(c.r_d_ohm, base.r_d, "circuit.r_d_ohm"),
        g_m: d.take(c.g_m_a_per_v, base.g_m, "circuit.g_m_a_per_v"),
        g_m2: d.take(c.g_m2_a_per_v2, base.g_m2, "circuit.g_m2_a_per_v2"),
        g_m3: d.take(c.g_m3_a_per_v3, base.g_m3, "circuit.g_m3_a_per_v3"),
        v_rf: d.take(c.v_rf_v, base.v_rf, "circuit.v_rf_v"),
        gamma: d.take(c.gamma, base.gamma, "circuit.gamma"),
        t_c: d.take(c.t_c_k, base.t_c, "circuit.t_c_k"),
        // optional overrides have no default value to apply
        kappa1_override: c.kappa1_rad_s,
        kappa2_override: c.kappa2_rad_s,
        v_op: c.v_op_v,
    };
    circuit.validate()?;

    let s = raw.sweep.unwrap_or_default();
    let sweep = SweepConfig {
        omega_axis: Axis::new(
            d.take(
                s.omega_min_rad_s,
                DEFAULT_OMEGA_MIN,
                "sweep.omega_min_rad_s",
            ),
            d.take(
                s.omega_max_rad_s,
                DEFAULT_OMEGA_MAX,
                "sweep.omega_max_rad_s",
            ),
            d.take(s.omega_points, DEFAULT_POINTS, "sweep.omega_points"),
        ),
        gm_axis: Axis::new(
            d.take(s.gm_min_a_per_v, DEFAULT_GM_MIN, "sweep.gm_min_a_per_v"),
            d.take(s.gm_max_a_per_v, DEFAULT_GM_MAX, "sweep.gm_max_a_per_v"),
            d.take(s.gm_points, DEFAULT_POINTS, "sweep.gm_points"),
        ),
        v_rf: d.take(s.v_rf_v, circuit.v_rf, "sweep.v_rf_v"),
        backend: d.take(s.backend, Backend::default(), "sweep.backend"),
        thermal_reference: d.take(
            s.thermal_reference,
            ThermalReference::default(),
            "sweep.thermal_reference",
        ),
        base: circuit,
    };

    let o = raw.output.unwrap_or_default();
    let defaults = OutputConfig::default();
    let output = OutputConfig {
        directory: match o.directory {
            Some(p) => p,
            None => {
                log::info!("default applied: output.directory = {DEFAULT_OUTPUT_DIR}");
                d.0.push("output.directory".into());
                defaults.directory
            }
        },
        formats: match o.formats {
            Some(mut f) => {
                f.sort();
                f.dedup();
                f
            }
            None => {
                log::info!("default applied: output.formats = [csv, json]");
                d.0.push("output.formats".into());
                defaults.formats
            }
        },
        emit_plot_script: d.take(
            o.emit_plot_script,
            defaults.emit_plot_script,
            "output.emit_plot_script",
        ),
    };

    let config = RunConfig { sweep, output };
    config.validate()?;
    Ok(LoadedConfig {
        config,
        defaulted: d.0,
    })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Serialize with every key explicit; [`parse_config`] reads it back unchanged.
pub fn to_toml(config: &RunConfig) -> String {
    let c = config.circuit();
    let s = &config.sweep;
    let raw = RawConfig {
        circuit: Some(RawCircuit {
            c_gs_f: Some(c.c_gs),
            c_gd_f: Some(c.c_gd),
            c_ds_f: Some(c.c_ds),
            c_in_f: Some(c.c_in),
            l_g_h: Some(c.l_g),
            l_d_h: Some(c.l_d),
            r_g_ohm: Some(c.r_g),
            r_s_ohm: Some(c.r_s),
            r_d_ohm: Some(c.r_d),
            g_m_a_per_v: Some(c.g_m),
            g_m2_a_per_v2: Some(c.g_m2),
            g_m3_a_per_v3: Some(c.g_m3),
            v_rf_v: Some(c.v_rf),
            gamma: Some(c.gamma),
            t_c_k: Some(c.t_c),
            kappa1_rad_s: c.kappa1_override,
            kappa2_rad_s: c.kappa2_override,
            v_op_v: c.v_op,
        }),
        sweep: Some(RawSweep {
            omega_min_rad_s: Some(s.omega_axis.min),
            omega_max_rad_s: Some(s.omega_axis.max),
            omega_points: Some(s.omega_axis.n),
            gm_min_a_per_v: Some(s.gm_axis.min),
            gm_max_a_per_v: Some(s.gm_axis.max),
            gm_points: Some(s.gm_axis.n),
            v_rf_v: Some(s.v_rf),
            backend: Some(s.backend),
            thermal_reference: Some(s.thermal_reference),
        }),
        output: Some(RawOutput {
            directory: Some(config.output.directory.clone()),
            formats: Some(config.output.formats.clone()),
            emit_plot_script: Some(config.output.emit_plot_script),
        }),
    };
    toml::to_string(&raw).expect("config fields are plain TOML values")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_takes_all_defaults() {
        let loaded = parse_config("[circuit]\n").unwrap();
        assert_eq!(loaded.config, RunConfig::default());
        assert!(loaded.defaulted.contains(&"circuit.c_gs_f".to_string()));
        assert!(loaded.defaulted.contains(&"output.formats".to_string()));
        // 15 circuit + 9 sweep + 3 output
        assert_eq!(loaded.defaulted.len(), 27);
    }

    #[test]
    fn explicit_keys_are_not_defaulted() {
        let loaded =
            parse_config("[circuit]\nc_gs_f = 1.5e-12\n[sweep]\nbackend = \"closure\"\n").unwrap();
        assert_eq!(loaded.config.circuit().c_gs, 1.5e-12);
        assert_eq!(loaded.config.sweep.backend, Backend::Closure);
        assert!(!loaded
            .defaulted
            .iter()
            .any(|k| k == "circuit.c_gs_f" || k == "sweep.backend"));
        assert_eq!(loaded.defaulted.len(), 25);
    }

    #[test]
    fn negative_capacitance_names_field() {
        match parse_config("[circuit]\nc_gs_f = -1.0\n") {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "c_gs"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        match parse_config("[circuit]\nc_gs_f = 2e-12\nc_gx = 1.0\n") {
            Err(Error::UnknownKey { key, line }) => {
                assert_eq!(key, "c_gx");
                assert_eq!(line, 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config("[plotting]\n"),
            Err(Error::UnknownKey { .. })
        ));
    }

    #[test]
    fn syntax_error_reports_line() {
        match parse_config("[circuit]\n\nc_gs_f = = 2\n") {
            Err(Error::ConfigParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_v_rf_follows_circuit_by_default() {
        let loaded = parse_config("[circuit]\nv_rf_v = 0.02\n").unwrap();
        assert_eq!(loaded.config.sweep.v_rf, 0.02);
    }

    #[test]
    fn invalid_axes_rejected() {
        let err = parse_config("[sweep]\nomega_points = 0\n").unwrap_err();
        assert!(err.is_validation());
        assert!(parse_config("[output]\nformats = []\n").is_err());
    }

    #[test]
    fn round_trip() {
        let mut config = RunConfig::default();
        config.sweep.base.kappa1_override = Some(3.3e9);
        config.sweep.base.v_op = Some(0.015);
        config.sweep.backend = Backend::Closure;
        config.sweep.omega_axis = Axis::new(1.234567890123e9, 9.87654321e10, 7);
        config.output.emit_plot_script = false;
        config.output.formats = vec![OutputFormat::Json];
        let text = to_toml(&config);
        let back = parse_config(&text).unwrap();
        assert_eq!(back.config, config);
        assert!(back.defaulted.is_empty());
        assert_eq!(to_toml(&back.config), text);
    }
}
