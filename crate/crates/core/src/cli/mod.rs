//! The `nhadm` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 I/O failure, 4 numerical
//! failure (non-convergence, or a singular or degenerate evaluation).

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::integration::QuadratureConfig;
use crate::model::ModelParams;
use crate::response::Units;
use crate::Error;
use config::{pick, FileConfig};
use output::Format;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::PreconditionViolation(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nhadm", version, about = "Complex bands, Berry phase and Hall admittance of the non-Hermitian Dirac model")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Mass m
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Non-Hermitian mass δ
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa_x: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa_y: Option<f64>,
    /// Brillouin zone is [-w, w]²
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub bz_half_width: Option<f64>,
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    #[arg(long, global = true)]
    pub adaptive_tol: Option<f64>,
    #[arg(long, global = true)]
    pub singular_exclusion_radius: Option<f64>,
    /// Comma-separated square half-widths for the continuum extrapolation
    #[arg(long, global = true)]
    pub continuum_radii: Option<String>,
    #[arg(long, global = true)]
    pub max_depth: Option<u32>,
    #[arg(long, global = true)]
    pub max_cells: Option<usize>,
    /// key = value file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (standard output if omitted or `-`)
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads (does not change the output)
    #[arg(long, env = "NHADM_THREADS", global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteArg {
    ClosedForm,
    ProjectorTrace,
    Plaquette,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Adaptive,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainArg {
    Continuum,
    Bz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSource {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitsArg {
    Natural,
    Si,
}

impl From<UnitsArg> for Units {
    fn from(u: UnitsArg) -> Units {
        match u {
            UnitsArg::Natural => Units::Natural,
            UnitsArg::Si => Units::Si,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    M,
    Delta,
    KappaX,
    KappaY,
}

impl SweepAxis {
    pub fn set(self, p: &mut ModelParams, v: f64) {
        match self {
            SweepAxis::M => p.m = v,
            SweepAxis::Delta => p.delta = v,
            SweepAxis::KappaX => p.kappa_x = v,
            SweepAxis::KappaY => p.kappa_y = v,
        }
    }
}

impl std::str::FromStr for Sweep {
    type Err = String;

    /// `axis:start:stop:steps`, e.g. `kappa_x:-1:1:41`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(format!("sweep `{s}`: expected axis:start:stop:steps"));
        }
        let axis = match parts[0].replace('-', "_").as_str() {
            "m" => SweepAxis::M,
            "delta" => SweepAxis::Delta,
            "kappa_x" => SweepAxis::KappaX,
            "kappa_y" => SweepAxis::KappaY,
            a => return Err(format!("unknown sweep axis `{a}`")),
        };
        let num = |t: &str| t.parse::<f64>().map_err(|_| format!("sweep `{s}`: bad number `{t}`"));
        let (start, stop) = (num(parts[1])?, num(parts[2])?);
        let steps: usize = parts[3].parse().map_err(|_| format!("sweep `{s}`: bad step count"))?;
        if steps < 2 {
            return Err(format!("sweep `{s}`: at least 2 steps needed"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(format!("sweep `{s}`: bounds must be finite"));
        }
        Ok(Sweep { axis, start, stop, steps })
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Complex bands on an nx × ny grid over the Brillouin zone
    Bands {
        #[arg(long, default_value_t = 101)]
        nx: usize,
        #[arg(long, default_value_t = 101)]
        ny: usize,
    },
    /// Berry curvature of the occupied band on a grid
    Curvature {
        #[arg(long, default_value_t = 41)]
        nx: usize,
        #[arg(long, default_value_t = 41)]
        ny: usize,
        #[arg(long, value_enum, default_value_t = RouteArg::All)]
        route: RouteArg,
        /// Finite-difference step of the projector-trace route
        #[arg(long, default_value_t = crate::berry::DEFAULT_TRACE_STEP)]
        trace_step: f64,
        /// Side of the Wilson-loop plaquette
        #[arg(long, default_value_t = crate::berry::DEFAULT_PLAQUETTE_STEP)]
        plaquette_step: f64,
    },
    /// Numeric and closed-form Berry phase with branch diagnostics
    BerryPhase {
        #[arg(long, value_enum, default_value_t = MethodArg::Adaptive)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = DomainArg::Continuum)]
        domain: DomainArg,
        /// Agreement tolerance for branch resolution
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Sign table over κx = κy, m = δ instead of a single point
        #[arg(long)]
        fig4_table: bool,
    },
    /// Gap classification and exceptional points
    GapScan {
        #[arg(long, default_value_t = 256)]
        nx: usize,
        #[arg(long, default_value_t = 256)]
        ny: usize,
        #[arg(long, default_value_t = crate::spectral::DEFAULT_GAP_THRESHOLD)]
        threshold: f64,
    },
    /// Gaps, exceptional points and Berry phase over a two-parameter sweep
    PhaseDiagram {
        #[arg(long)]
        sweep_x: Sweep,
        #[arg(long)]
        sweep_y: Sweep,
        /// Band-scan resolution per sweep point
        #[arg(long, default_value_t = 64)]
        scan_n: usize,
        #[arg(long, default_value_t = crate::spectral::DEFAULT_GAP_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = GammaSource::Analytic)]
        gamma_source: GammaSource,
    },
    /// Hall conductance, susceptance and quantum capacitance or inductance
    Admittance {
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, value_enum, default_value_t = UnitsArg::Natural)]
        units: UnitsArg,
        #[arg(long, value_enum, default_value_t = GammaSource::Analytic)]
        gamma_source: GammaSource,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bands { .. } => "bands",
            Command::Curvature { .. } => "curvature",
            Command::BerryPhase { .. } => "berry-phase",
            Command::GapScan { .. } => "gap-scan",
            Command::PhaseDiagram { .. } => "phase-diagram",
            Command::Admittance { .. } => "admittance",
        }
    }
}

/// Fully resolved run settings. Everything here is echoed into the output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub command: &'static str,
    pub params: ModelParams,
    pub quadrature: QuadratureConfig,
    pub format: Format,
    pub omega: Option<f64>,
}

pub fn resolve(common: &CommonArgs, command: &Command) -> Result<Settings, CliError> {
    let file = match &common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let d = QuadratureConfig::default();
    let radii = match &common.continuum_radii {
        Some(s) => config::parse_list(s)?,
        None => file.get_list("continuum_radii")?.unwrap_or(d.continuum_radii.clone()),
    };
    let quadrature = QuadratureConfig {
        grid_n: pick(common.grid_n, &file, "grid_n", d.grid_n)?,
        adaptive_tol: pick(common.adaptive_tol, &file, "adaptive_tol", d.adaptive_tol)?,
        singular_exclusion_radius: pick(
            common.singular_exclusion_radius,
            &file,
            "singular_exclusion_radius",
            d.singular_exclusion_radius,
        )?,
        continuum_radii: radii,
        max_depth: pick(common.max_depth, &file, "max_depth", d.max_depth)?,
        max_cells: pick(common.max_cells, &file, "max_cells", d.max_cells)?,
    };
    quadrature.validate()?;
    let params = ModelParams::with_bz(
        pick(common.m, &file, "m", 1.0)?,
        pick(common.delta, &file, "delta", 0.0)?,
        pick(common.kappa_x, &file, "kappa_x", 0.0)?,
        pick(common.kappa_y, &file, "kappa_y", 0.0)?,
        pick(common.bz_half_width, &file, "bz_half_width", 1.0)?,
    )?;
    let flag_omega = match command {
        Command::Admittance { omega, .. } => *omega,
        _ => None,
    };
    let omega = match flag_omega {
        Some(w) => Some(w),
        None => file.get("omega")?,
    };
    Ok(Settings {
        command: command.name(),
        params,
        quadrature,
        format: pick(common.format, &file, "format", Format::Csv)?,
        omega,
    })
}

fn config_echo(settings: &Settings, command: &Command) -> Value {
    let mut v = serde_json::to_value(settings).expect("settings serialise");
    v["options"] = serde_json::to_value(command).expect("options serialise");
    v
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let settings = resolve(&cli.common, &cli.command)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
    let report = pool.install(|| commands::run(&settings, &cli.command))?;
    let version = crate::version_string();
    let echo = config_echo(&settings, &cli.command);
    let bytes = match settings.format {
        Format::Csv => output::render_csv(&report, &version, &echo)?,
        Format::Json => output::render_json(&report, &version, &echo)?,
    };
    let path = cli.common.output.as_deref();
    output::emit(&bytes, path)?;
    if let Some(s) = &report.summary {
        let line = format!("{s}\n");
        let to_stdout = matches!(path, Some(p) if p.as_os_str() != "-");
        let res = if to_stdout {
            output::emit(line.as_bytes(), None)
        } else {
            use std::io::Write;
            std::io::stderr().write_all(line.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        };
        res?;
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("nhadm: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os())
}
