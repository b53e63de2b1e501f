//! The `dwkin` command line.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 1 when a run fails, 2 for usage and
//! configuration errors.

mod args;
mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use args::{parse_constants, parse_drive, parse_duration, parse_pulse, ConstantsSpec, PulseSpec};

use crate::electrical::TerminalDrive;
use crate::tables::{CornerKey, LookupMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(name = "dwkin", version, about = "Kinematic domain-wall model toolkit")]
pub struct Cli {
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,

    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,

    /// Output format for trajectories and reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Simulate wall motion under current pulses, waveform files or a
    /// terminal-voltage drive.
    Simulate(SimulateArgs),
    /// Extract wall position and velocity from magnetization tables.
    Extract(ExtractArgs),
    /// Fit model constants per corner folder and write lookup tables.
    Fit(FitArgs),
    /// Inspect, merge and query lookup tables.
    #[command(subcommand)]
    Tables(TablesCommand),
    /// Compare baseline models against the kinematic model.
    Compare(CompareArgs),
    /// Time the kinematic model against the baselines.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LookupArg {
    Exact,
    Nearest,
    Multilinear,
}

impl From<LookupArg> for LookupMode {
    fn from(m: LookupArg) -> Self {
        match m {
            LookupArg::Exact => LookupMode::Exact,
            LookupArg::Nearest => LookupMode::Nearest,
            LookupArg::Multilinear => LookupMode::Multilinear,
        }
    }
}

/// Where the model constants come from.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstantsArgs {
    /// Corner in `.tbl` units, e.g. `Aex=11,Banis=20,alpha=0.01,Msat=7.95e5,W=100`.
    #[arg(long, conflicts_with = "constants")]
    pub corner: Option<CornerKey>,

    /// Explicit constants `c0,c1,c2,c3,d1,d2`.
    #[arg(long, value_parser = parse_constants)]
    pub constants: Option<ConstantsSpec>,

    /// Directory holding the six `.tbl` files (default: bundled tables).
    #[arg(long)]
    pub tables: Option<PathBuf>,

    /// How a corner is resolved against the tables.
    #[arg(long, value_enum, default_value_t = LookupArg::Exact)]
    pub lookup: LookupArg,

    /// Pinning current threshold, A/m².
    #[arg(long)]
    pub p1: Option<f64>,

    /// Pinning velocity threshold, m/s.
    #[arg(long)]
    pub p2: Option<f64>,

    /// Coefficient of restitution at the track ends.
    #[arg(long)]
    pub restitution: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrackArgs {
    /// Track length, nm.
    #[arg(long, default_value_t = 500.0)]
    pub length_nm: f64,

    /// Track width, nm (default: the corner's W, else 100).
    #[arg(long)]
    pub width_nm: Option<f64>,

    /// Track thickness, nm.
    #[arg(long, default_value_t = 1.2)]
    pub thickness_nm: f64,
}

/// Current waveform sources.
#[derive(Debug, Clone, Args, Serialize)]
pub struct DriveArgs {
    /// Rectangular pulse `J=<A/m²>,tau=<duration>`; repeated pulses follow
    /// each other.
    #[arg(long = "pulse", value_parser = parse_pulse)]
    pub pulses: Vec<PulseSpec>,

    /// Zero-current time after the pulses.
    #[arg(long, value_parser = parse_duration, default_value = "0ns")]
    pub settle: f64,

    /// Two-column waveform CSV (`t_start_ns,J_Apm2`, optional `end` footer).
    #[arg(long = "waveform")]
    pub waveforms: Vec<PathBuf>,

    /// Duration of waveform files without an `end` footer.
    #[arg(long, value_parser = parse_duration)]
    pub duration: Option<f64>,

    /// Output sampling interval.
    #[arg(long, value_parser = parse_duration, default_value = "0.01ns")]
    pub sample_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorArg {
    Exact,
    Euler,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[command(flatten)]
    pub track: TrackArgs,
    #[command(flatten)]
    pub drive: DriveArgs,

    #[arg(long, value_enum, default_value_t = IntegratorArg::Exact)]
    pub integrator: IntegratorArg,

    /// Euler step.
    #[arg(long, value_parser = parse_duration, default_value = "0.001ns")]
    pub euler_dt: f64,

    /// Initial wall position, nm from the left end (default: centre).
    #[arg(long)]
    pub start_nm: Option<f64>,

    /// Drive the DW-MTJ device with terminal voltages `P=..,Q=..[,RA=..]`
    /// for `--duration` instead of a current waveform.
    #[arg(long, value_parser = parse_drive, conflicts_with_all = ["pulses", "waveforms"])]
    pub mtj: Option<TerminalDrive>,

    /// Parallel-state MTJ resistance, Ω.
    #[arg(long, default_value_t = 1e3)]
    pub rp: f64,

    /// Antiparallel-state MTJ resistance, Ω.
    #[arg(long, default_value_t = 1e6)]
    pub rap: f64,

    /// Device step.
    #[arg(long, value_parser = parse_duration, default_value = "0.001ns")]
    pub device_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutArg {
    Auto,
    Shift,
    Profile,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtractParams {
    /// Distance between magnetization samples, m.
    #[arg(long, default_value_t = crate::fitting::DEFAULT_SPACING)]
    pub spacing: f64,

    /// Sample lag of the position difference.
    #[arg(long, default_value_t = crate::fitting::DEFAULT_DIFF_LAG)]
    pub lag: usize,

    /// Gaussian smoothing window, samples.
    #[arg(long, default_value_t = crate::fitting::DEFAULT_SMOOTH_WINDOW)]
    pub smooth: usize,

    /// Column layout of the tables.
    #[arg(long, value_enum, default_value_t = LayoutArg::Auto)]
    pub layout: LayoutArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtractArgs {
    /// Input files or glob patterns.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    #[command(flatten)]
    pub params: ExtractParams,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Corner folders holding `*.motion.csv` files or mumax tables.
    #[arg(required = true)]
    pub folders: Vec<PathBuf>,

    /// Trials are kept through the first one with J at or above this, A/m².
    #[arg(long, default_value_t = crate::fitting::DEFAULT_J_CAP)]
    pub j_cap: f64,

    /// Extraction settings for folders holding raw tables.
    #[command(flatten)]
    pub params: ExtractParams,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum TablesCommand {
    /// List every corner and its constants.
    Inspect {
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Merge table directories into `--output-dir`.
    Merge {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Resolve one corner.
    Lookup {
        #[arg(long)]
        corner: CornerKey,
        #[arg(long, value_enum, default_value_t = LookupArg::Exact)]
        mode: LookupArg,
        #[arg(long)]
        tables: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[command(flatten)]
    pub track: TrackArgs,
    #[command(flatten)]
    pub drive: DriveArgs,

    /// Baselines to compare (default: all).
    #[arg(long, value_delimiter = ',')]
    pub models: Vec<String>,

    /// Drive at which baselines are matched to the terminal velocity, A/m².
    #[arg(long, default_value_t = 4e10)]
    pub j_ref: f64,

    /// End of the drive for the stop window (default: start of the final
    /// zero-current segment).
    #[arg(long, value_parser = parse_duration)]
    pub pulse_end: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[command(flatten)]
    pub constants: ConstantsArgs,

    /// Simulated time of the pulse train.
    #[arg(long, value_parser = parse_duration, default_value = "1000ns")]
    pub duration: f64,

    /// Width of each pulse.
    #[arg(long, value_parser = parse_duration, default_value = "10ns")]
    pub pulse_width: f64,

    /// Zero-current gap after each pulse.
    #[arg(long, value_parser = parse_duration, default_value = "10ns")]
    pub gap: f64,

    /// Pulse amplitudes, A/m², cycled with alternating sign.
    #[arg(long, value_delimiter = ',', default_value = "2e10,4e10")]
    pub amplitudes: Vec<f64>,

    /// Sampling interval, also the baselines' integration step.
    #[arg(long, value_parser = parse_duration, default_value = "0.001ns")]
    pub dt: f64,

    #[arg(long, default_value_t = 7)]
    pub reps: usize,

    #[arg(long, default_value_t = 1)]
    pub warmup: usize,

    /// Models to time (default: kinematic_exact and all baselines).
    #[arg(long, value_delimiter = ',')]
    pub models: Vec<String>,

    /// Track length, nm.
    #[arg(long, default_value_t = 1e6)]
    pub length_nm: f64,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Runtime(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

/// Line written at the top of every output file.
pub fn provenance(cli: &Cli) -> String {
    #[derive(Serialize)]
    struct Config<'a> {
        format: Format,
        command: &'a Command,
    }
    let json = serde_json::to_vec(&Config {
        format: cli.format,
        command: &cli.command,
    })
    .expect("config serializes");
    let digest = Sha256::digest(&json);
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("dwkin {} config={hex}", env!("CARGO_PKG_VERSION"))
}

/// Parse `argv` (including the program name) and run.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("dwkin: {}", f.message());
            f.code()
        }
    }
}
