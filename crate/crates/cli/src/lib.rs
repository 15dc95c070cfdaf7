//! Command-line driver: signal, sensitivity, FWHM, Wigner, loss and peak tables,
//! plus the engine-versus-oracle regression check.

pub mod commands;
pub mod config;
pub mod error;
pub mod oracle_check;
pub mod spec;
pub mod table;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::CliError;
use spec::{Command, Format, ScanSpec};
use table::Table;

#[derive(Debug, Parser)]
#[command(name = "qlidar", version, about = "Interferometric LiDAR resolution and sensitivity tables")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// <X>(phi) for one or more states.
    Signal(ScanArgs),
    /// delta_phi, SNL and their ratio against phi.
    Sensitivity(ScanArgs),
    /// FWHM of all six states against a swept parameter.
    Fwhm(ScanArgs),
    /// Wigner function on a square grid.
    Wigner(ScanArgs),
    /// FWHM or sensitivity ratio against loss_r.
    Loss(ScanArgs),
    /// Peak counts inside a phase window.
    Peaks(ScanArgs),
    /// Compare the engine against the Fock-space oracle.
    OracleCheck(ScanArgs),
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// State kind, comma list, or `all`.
    #[arg(long, allow_hyphen_values = true)]
    state_a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_phase: Option<String>,
    /// Fix the first input's mean photon number instead of |alpha|^2.
    #[arg(long, allow_hyphen_values = true)]
    mean_photons: Option<String>,
    /// `vacuum` or a state kind.
    #[arg(long, allow_hyphen_values = true)]
    state_b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    zeta2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    zeta_phase: Option<String>,
    /// `parity` or `z`.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi_max: Option<String>,
    #[arg(long)]
    phi_steps: Option<String>,
    /// Fixed phase for ratio sweeps and reduced Wigner functions.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    loss_r: Option<String>,
    /// fwhm x axis: alpha2, mean-photons, zeta2 or loss-r.
    #[arg(long)]
    sweep: Option<String>,
    /// `v1,v2,...` or `start:stop:count`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// loss metric: fwhm or ratio.
    #[arg(long)]
    metric: Option<String>,
    /// SNL energy: total or first.
    #[arg(long)]
    snl: Option<String>,
    /// Peak window `lo,hi`; accepts multiples of pi.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// upper, lower, either or dominant.
    #[arg(long)]
    side: Option<String>,
    #[arg(long)]
    half_width: Option<String>,
    #[arg(long)]
    resolution: Option<String>,
    /// Wigner function of the port-a output instead of the input.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    reduced: Option<String>,
    #[arg(long)]
    tolerance: Option<String>,
    /// Small oracle grid.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    quick: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl ScanArgs {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("state-a", &self.state_a),
            ("alpha2", &self.alpha2),
            ("alpha-phase", &self.alpha_phase),
            ("mean-photons", &self.mean_photons),
            ("state-b", &self.state_b),
            ("zeta2", &self.zeta2),
            ("zeta-phase", &self.zeta_phase),
            ("scheme", &self.scheme),
            ("phi-min", &self.phi_min),
            ("phi-max", &self.phi_max),
            ("phi-steps", &self.phi_steps),
            ("phi", &self.phi),
            ("loss-r", &self.loss_r),
            ("sweep", &self.sweep),
            ("grid", &self.grid),
            ("metric", &self.metric),
            ("snl", &self.snl),
            ("window", &self.window),
            ("side", &self.side),
            ("half-width", &self.half_width),
            ("resolution", &self.resolution),
            ("reduced", &self.reduced),
            ("tolerance", &self.tolerance),
            ("quick", &self.quick),
            ("out", &self.out),
            ("format", &self.format),
        ]
    }

    /// Config file entries overlaid by the flags that were given.
    fn merged(&self) -> Result<BTreeMap<String, String>, CliError> {
        let mut map = match &self.config {
            Some(path) => config::parse_config(&std::fs::read_to_string(path).map_err(|e| {
                CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
            })?)?,
            None => BTreeMap::new(),
        };
        for (key, value) in self.flags() {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        }
        Ok(map)
    }
}

/// Builds the table for an already validated spec.
pub fn build_table(spec: &ScanSpec) -> Result<Table, CliError> {
    match spec.command {
        Command::Signal => commands::signal(spec),
        Command::Sensitivity => commands::sensitivity(spec),
        Command::Fwhm => commands::fwhm_table(spec),
        Command::Wigner => commands::wigner(spec),
        Command::Loss => commands::loss(spec),
        Command::Peaks => commands::peaks(spec),
        Command::OracleCheck => commands::oracle_check(spec).map(|(t, ..)| t),
    }
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn emit(spec: &ScanSpec, text: &str) -> Result<(), CliError> {
    match &spec.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn spec_of(cli: &Cli) -> Result<ScanSpec, CliError> {
    let (command, args) = match &cli.command {
        Sub::Signal(a) => (Command::Signal, a),
        Sub::Sensitivity(a) => (Command::Sensitivity, a),
        Sub::Fwhm(a) => (Command::Fwhm, a),
        Sub::Wigner(a) => (Command::Wigner, a),
        Sub::Loss(a) => (Command::Loss, a),
        Sub::Peaks(a) => (Command::Peaks, a),
        Sub::OracleCheck(a) => (Command::OracleCheck, a),
    };
    ScanSpec::from_map(command, &args.merged()?)
}

/// Argument parsing and validation only; nothing is computed or written.
pub fn parse_spec<I, T>(args: I) -> Result<ScanSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::spec("arguments", e.kind().to_string()))?;
    spec_of(&cli)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let spec = spec_of(&cli)?;
    let command = spec.command;
    if command == Command::OracleCheck {
        let (table, failure, summary) = commands::oracle_check(&spec)?;
        emit(&spec, &render(&table, spec.format))?;
        eprintln!("{summary}");
        return match failure {
            Some(msg) => Err(CliError::OracleDisagreement(msg)),
            None => Ok(()),
        };
    }
    let table = build_table(&spec)?;
    emit(&spec, &render(&table, spec.format))
}

/// Parses `args` (program name first) and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qlidar: {e}");
            e.exit_code()
        }
    }
}
