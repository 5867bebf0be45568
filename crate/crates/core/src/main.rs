use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use lna_entangle::config::{load_config, OutputFormat, RunConfig};
use lna_entangle::output::{
    build_report, write_grid_csv, write_plot_script, write_report, ModelConstants, REPORT_FILE,
};
use lna_entangle::spectral::MomentSet;
use lna_entangle::sweep::{evaluate_point, run_sweep, Backend, WORKERS_ENV};
use lna_entangle::{noise_figure, quantize, CircuitParams, EntanglementReport, Error, NoiseReport};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Parser)]
#[command(
    version,
    about = "Quantized LNA model: photon moments, entanglement metric and noise figure"
)]
#[command(after_help = format!("Set {WORKERS_ENV} to fix the sweep worker count."))]
struct Cli {
    /// Log applied defaults and progress
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the quantized model and the Hamiltonian coefficients
    Quantize {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Transconductance override (mS)
        #[arg(long)]
        gm: Option<f64>,
    },
    /// Moments and metrics at one point, from both backends
    Point {
        /// Probe frequency (GHz)
        #[arg(long)]
        omega: f64,
        /// Transconductance (mS)
        #[arg(long)]
        gm: f64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the configured grid sweep and write CSV, JSON and plot files
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides output.directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noise report at one frequency
    Nf {
        /// Probe frequency (GHz)
        #[arg(long)]
        omega: f64,
        /// Transconductance override (mS)
        #[arg(long)]
        gm: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Check a configuration file and list the defaults it relies on
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        e if e.is_validation() => 1,
        _ => 2,
    }
}

fn load(path: Option<&Path>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => Ok(load_config(p)?.config),
        None => Ok(RunConfig::default()),
    }
}

fn with_gm(params: &CircuitParams, gm_ms: Option<f64>) -> CircuitParams {
    let mut p = *params;
    if let Some(g) = gm_ms {
        p.g_m = g * 1e-3;
    }
    p
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("plain data")
    );
}

#[derive(Serialize)]
struct BackendPoint {
    backend: String,
    moments: MomentSet,
    entanglement: Option<EntanglementReport>,
    entanglement_error: Option<String>,
}

#[derive(Serialize)]
struct PointOutput {
    omega_rad_s: f64,
    g_m_a_per_v: f64,
    backends: Vec<BackendPoint>,
    noise: Option<NoiseReport>,
    noise_error: Option<String>,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Quantize { config, gm } => {
            let config = load(config.as_deref())?;
            let params = with_gm(config.circuit(), gm);
            let q = quantize(&params)?;
            print_json(&ModelConstants::from(&q));
        }
        Command::Point { omega, gm, config } => {
            let config = load(config.as_deref())?;
            let params = CircuitParams {
                g_m: gm * 1e-3,
                ..*config.circuit()
            };
            let w = TWO_PI * omega * 1e9;
            let mut backends = Vec::new();
            let mut noise = None;
            for backend in [Backend::Closure, Backend::Covariance] {
                let p = evaluate_point(&params, w, backend, config.sweep.thermal_reference)?;
                noise = Some(p.noise);
                backends.push(BackendPoint {
                    backend: backend.to_string(),
                    moments: p.moments,
                    entanglement: p.entanglement.ok(),
                    entanglement_error: p.entanglement.err().map(|r| r.code().to_string()),
                });
            }
            let noise = noise.expect("two backends evaluated");
            print_json(&PointOutput {
                omega_rad_s: w,
                g_m_a_per_v: params.g_m,
                backends,
                noise: noise.ok(),
                noise_error: noise.err().map(|r| r.code().to_string()),
            });
        }
        Command::Sweep { config, out } => {
            let mut config = load_config(&config)?.config;
            if let Some(dir) = out {
                config.output.directory = dir;
            }
            let result = run_sweep(&config.sweep)?;
            let dir = &config.output.directory;
            if config.output.wants(OutputFormat::Csv) {
                write_grid_csv(&result, dir)?;
            }
            if config.output.wants(OutputFormat::Json) {
                write_report(&build_report(&config, &result)?, &dir.join(REPORT_FILE))?;
            }
            if config.output.emit_plot_script {
                write_plot_script(dir)?;
            }
            if result.all_failed() {
                return Err(Error::EmptyRegion);
            }
            log::info!("wrote {} cells to {}", result.len(), dir.display());
        }
        Command::Nf { omega, gm, config } => {
            let config = load(config.as_deref())?;
            let params = with_gm(config.circuit(), gm);
            print_json(&noise_figure(&params, TWO_PI * omega * 1e9)?);
        }
        Command::Validate { config } => {
            let loaded = load_config(&config)?;
            println!("{}: ok", config.display());
            for key in &loaded.defaulted {
                println!("default: {key}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
