mod commands;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kinkspec::config::{Format, RunConfig};
use kinkspec::Error;

use output::{Check, Sink};

#[derive(Parser, Debug)]
#[command(name = "kinkspec", version, about = "Spectral and mass-shift numerics for the phi^4 kink")]
struct Cli {
    /// TOML run configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; repeat for several.
    #[arg(long, global = true, value_enum)]
    format: Vec<FormatArg>,
    /// Comma-separated cutoffs in units of m.
    #[arg(long, global = true, value_delimiter = ',')]
    kappa_list: Option<Vec<f64>>,
    /// Seed for randomized bound tests.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exit with status 4 when an acceptance check fails.
    #[arg(long, global = true)]
    check: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound states, phase shifts and the spectral consistency report.
    Spectrum,
    /// Distorted Fourier transform of a test profile, or inverse of imported coefficients.
    Transform {
        /// CSV of (k, re, im) on the configured momentum grid.
        #[arg(long)]
        coefficients: Option<PathBuf>,
    },
    /// Spectrum of the covariance comparison operator and counterterm constants.
    Kernels,
    /// Regularized mass-shift breakdown over the cutoff schedule.
    MassShift,
    /// Hermite wave-packet time series.
    Wavepacket,
    /// Wick bounds, quadratic evolution, zero-mode growth and the interaction comparison.
    Fock,
    /// Runs every command and its checks; implies --check.
    Check,
    /// Prints the effective configuration as TOML.
    Config,
}

enum Failure {
    Config(String),
    Resolution(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParam(_) => Failure::Config(e.to_string()),
            Error::Resolution(_) => Failure::Resolution(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if !cli.format.is_empty() {
        cfg.output.formats = cli
            .format
            .iter()
            .map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            })
            .collect();
    }
    if let Some(k) = &cli.kappa_list {
        cfg.kappas = k.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(cfg)
}

fn run_one(name: &str, cfg: &RunConfig, dir: &Path, cmd: &Command) -> Result<Vec<Check>, Failure> {
    let mut sink = Sink::new(dir, &cfg.output.formats)?;
    let checks = match cmd {
        Command::Spectrum => commands::spectrum(cfg, &mut sink)?,
        Command::Transform { coefficients } => commands::transform(cfg, coefficients.as_deref(), &mut sink)?,
        Command::Kernels => commands::kernels(cfg, &mut sink)?,
        Command::MassShift => commands::mass_shift(cfg, &mut sink)?,
        Command::Wavepacket => commands::wavepacket(cfg, &mut sink)?,
        Command::Fock => commands::fock(cfg, &mut sink)?,
        Command::Check | Command::Config => unreachable!("dispatched separately"),
    };
    sink.table(&format!("{name}_checks"), &checks)?;
    for path in &sink.written {
        println!("wrote {}", path.display());
    }
    Ok(checks)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let cfg = load_config(cli)?;
    let dir = cfg.output.dir.clone();
    let checks = match &cli.command {
        Command::Config => {
            print!("{}", cfg.to_toml());
            return Ok(true);
        }
        Command::Check => {
            let all = [
                ("spectrum", Command::Spectrum),
                ("transform", Command::Transform { coefficients: None }),
                ("kernels", Command::Kernels),
                ("mass_shift", Command::MassShift),
                ("wavepacket", Command::Wavepacket),
                ("fock", Command::Fock),
            ];
            let mut checks = Vec::new();
            for (name, cmd) in &all {
                checks.extend(run_one(name, &cfg, &dir.join(name), cmd)?);
            }
            checks
        }
        cmd => {
            let name = match cmd {
                Command::Spectrum => "spectrum",
                Command::Transform { .. } => "transform",
                Command::Kernels => "kernels",
                Command::MassShift => "mass_shift",
                Command::Wavepacket => "wavepacket",
                _ => "fock",
            };
            run_one(name, &cfg, &dir, cmd)?
        }
    };
    for c in &checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        println!("{tag} {} {}: {:.3e} (bound {:.1e})", c.command, c.name, c.value, c.bound);
    }
    Ok(checks.iter().all(|c| c.pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let enforce = cli.check || matches!(cli.command, Command::Check);
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if enforce => ExitCode::from(4),
        Ok(false) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resolution(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
